#include "cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "rareval/error.hpp"
#include "rareval/evaluation.hpp"
#include "rareval/metrics.hpp"
#include "rareval/rarity.hpp"
#include "rareval/stats.hpp"
#include "rareval/synth.hpp"
#include "rareval/trec_io.hpp"

namespace rareval::cli {
namespace {

using nlohmann::json;

const std::vector<double> kAlphaGrid = {0.0, 0.25, 0.5, 0.75, 1.0};

// Usage problems detected after CLI11 parsing.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DataArgs {
  std::vector<std::string> runs;
  std::string qrels;
  int threshold = 1;
  std::string dedup = "reject";
  std::string order = "score";
  std::string rarity_depth = "unlimited";
};

struct MetricArgs {
  std::vector<std::string> metrics;
  std::vector<double> alphas;
  int cutoff = 100;
  std::optional<std::string> rarity;
  std::string ap_depth = "cutoff";
  bool skip_empty_topics = false;
};

struct OutputArgs {
  std::string format = "tsv";
  bool json = false;
  int digits = 4;
  int threads = 0;

  bool as_json() const { return json || format == "json"; }
};

std::string fixed(double value, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, value);
  return buf;
}

std::string short_real(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", value);
  return buf;
}

void add_data_options(CLI::App* app, DataArgs& args) {
  app->add_option("--runs", args.runs, "Run files, directories of run files, or - for stdin")
      ->required()
      ->expected(1, -1);
  app->add_option("--qrels", args.qrels, "Qrels file, or - for stdin")->required();
  app->add_option("--threshold", args.threshold, "Grade at or above which a document is relevant")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  app->add_option("--dedup", args.dedup, "Duplicate (topic, doc) in a run: reject or first")
      ->capture_default_str()
      ->check(CLI::IsMember({"reject", "first"}));
  app->add_option("--order", args.order, "Evaluation order: score or rank-field")
      ->capture_default_str()
      ->check(CLI::IsMember({"score", "rank-field"}));
  app->add_option("--rarity-depth", args.rarity_depth,
                  "How deep in each run a retrieval counts toward S_d: N or unlimited")
      ->capture_default_str();
}

void add_metric_options(CLI::App* app, MetricArgs& args, std::vector<std::string> default_metrics,
                        std::vector<double> default_alphas) {
  args.metrics = std::move(default_metrics);
  args.alphas = std::move(default_alphas);
  app->add_option("--metric", args.metrics,
                  "Metric names: P@k, AP, P@k_rareness, AP_rareness, P@k_mixture (k numeric or "
                  "literal k for --cutoff)")
      ->capture_default_str()
      ->delimiter(',');
  app->add_option("--alpha,--alphas", args.alphas, "Rarity weights for rareness metrics")
      ->capture_default_str()
      ->delimiter(',');
  app->add_option("--cutoff", args.cutoff, "Rank cutoff k")->capture_default_str()->check(CLI::PositiveNumber);
  app->add_option("--rarity", args.rarity, "Rarity function: eq2 or revised")
      ->check(CLI::IsMember({"eq2", "revised"}));
  app->add_option("--ap-depth", args.ap_depth, "AP summation depth: cutoff or full")
      ->capture_default_str()
      ->check(CLI::IsMember({"cutoff", "full"}));
  app->add_flag("--skip-empty-topics", args.skip_empty_topics,
                "Exclude topics without relevant documents from P@k means too");
}

void add_output_options(CLI::App* app, OutputArgs& args) {
  app->add_option("--format", args.format, "Output format: tsv or json")
      ->capture_default_str()
      ->check(CLI::IsMember({"tsv", "json"}));
  app->add_flag("--json", args.json, "Same as --format json");
  app->add_option("--digits", args.digits, "Decimal places in TSV output")
      ->capture_default_str()
      ->check(CLI::Range(0, 17));
  app->add_option("--threads", args.threads, "Worker threads (default: RAREVAL_THREADS or all cores)")
      ->check(CLI::NonNegativeNumber);
}

std::optional<int> parse_depth(const std::string& text) {
  if (text == "unlimited") return std::nullopt;
  int value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || value < 1)
    throw UsageError("--rarity-depth must be a positive integer or 'unlimited'");
  return value;
}

Campaign load(const DataArgs& args, const OutputArgs& out, std::ostream& err) {
  LoadOptions options;
  options.run.dedup = args.dedup == "first" ? DedupPolicy::kFirst : DedupPolicy::kReject;
  options.run.order = args.order == "rank-field" ? OrderPolicy::kRankField : OrderPolicy::kScore;
  options.relevance_threshold = args.threshold;
  options.threads = out.threads;
  Campaign campaign = load_campaign(args.runs, args.qrels, options);
  const auto unjudged = campaign.unjudged_topics();
  if (!unjudged.empty())
    err << "note: " << unjudged.size() << " topic(s) retrieved but not judged; they are not evaluated\n";
  if (campaign.num_systems() == 1)
    err << "warning: campaign has a single system; rarity carries no information\n";
  return campaign;
}

// Expands metric names over the alpha list: rareness metrics get one config
// per alpha unless the name pins alpha itself.
std::vector<MetricConfig> expand_metrics(const MetricArgs& args, std::ostream& err) {
  MetricDefaults defaults;
  defaults.cutoff = args.cutoff;
  if (args.rarity) defaults.rarity = parse_rarity_variant(*args.rarity);
  defaults.ap_depth = args.ap_depth == "full" ? ApDepth::kFull : ApDepth::kCutoff;
  defaults.skip_empty_topics = args.skip_empty_topics;

  std::vector<MetricConfig> out;
  for (const auto& name : args.metrics) {
    MetricConfig probe = parse_metric(name, defaults);
    const bool pinned = name.find("alpha=") != std::string::npos;
    if (!probe.uses_rarity() || pinned) {
      out.push_back(probe);
      continue;
    }
    for (double alpha : args.alphas) {
      MetricDefaults with_alpha = defaults;
      with_alpha.alpha = alpha;
      out.push_back(parse_metric(name, with_alpha));
    }
  }
  for (const auto& m : out)
    if (m.alpha_out_of_recommended_range())
      err << "warning: " << m.name() << " uses alpha > 1 (recommended range is [0, 1])\n";
  return out;
}

void print_json(std::ostream& out, const json& value) { out << value.dump(2) << '\n'; }

// ---------------------------------------------------------------- eval

struct EvalArgs {
  DataArgs data;
  MetricArgs metric;
  OutputArgs output;
  bool summary_only = false;
};

int run_eval(const EvalArgs& args, std::ostream& out, std::ostream& err) {
  const auto metrics = expand_metrics(args.metric, err);
  const Campaign campaign = load(args.data, args.output, err);
  const auto index = RarityIndex::build(campaign, parse_depth(args.data.rarity_depth));
  EvalOptions options;
  options.threads = args.output.threads;
  const auto matrices = evaluate_campaign(campaign, index, metrics, options);

  json rows = json::array();
  for (const auto& m : matrices) {
    const std::string name = m.metric.name();
    const auto means = mean_scores(m);
    for (std::size_t s = 0; s < m.systems.size(); ++s) {
      if (!args.summary_only)
        for (std::size_t t = 0; t < m.topics.size(); ++t) {
          if (m.skipped[t]) continue;
          rows.push_back({{"metric", name}, {"system", m.systems[s]}, {"topic", m.topics[t]},
                          {"score", m.at(s, t)}});
        }
      rows.push_back({{"metric", name}, {"system", m.systems[s]}, {"topic", "ALL"}, {"score", means[s]}});
    }
  }
  if (args.output.as_json()) {
    print_json(out, rows);
  } else {
    for (const auto& r : rows)
      out << r["metric"].get<std::string>() << '\t' << r["system"].get<std::string>() << '\t'
          << r["topic"].get<std::string>() << '\t' << fixed(r["score"].get<double>(), args.output.digits)
          << '\n';
  }
  return 0;
}

// ---------------------------------------------------------------- compare

struct CompareArgs {
  DataArgs data;
  MetricArgs metric;
  OutputArgs output;
};

int run_compare(const CompareArgs& args, std::ostream& out, std::ostream& err) {
  const auto metrics = expand_metrics(args.metric, err);
  for (const auto& m : metrics)
    if (!m.uses_rarity())
      throw UsageError("compare expects rareness metrics (e.g. P@k_rareness), got " + m.name());
  const Campaign campaign = load(args.data, args.output, err);
  const auto index = RarityIndex::build(campaign, parse_depth(args.data.rarity_depth));
  EvalOptions options;
  options.threads = args.output.threads;

  // Matrices for every rareness config and its base metric.
  std::vector<MetricConfig> all = metrics;
  for (const auto& m : metrics) all.push_back(base_metric(m));
  const auto matrices = evaluate_campaign(campaign, index, all, options);

  json rows = json::array();
  std::vector<std::tuple<double, std::string, double>> table;
  for (std::size_t i = 0; i < metrics.size(); ++i) {
    const double tau = kendall_tau(rank_systems(matrices[metrics.size() + i]), rank_systems(matrices[i]));
    table.emplace_back(metrics[i].alpha, metrics[i].base_name(), tau);
  }
  std::stable_sort(table.begin(), table.end(),
                   [](const auto& a, const auto& b) { return std::get<0>(a) < std::get<0>(b); });
  for (const auto& [alpha, name, tau] : table)
    rows.push_back({{"alpha", alpha}, {"metric", name}, {"tau", tau}});

  if (args.output.as_json()) {
    print_json(out, rows);
  } else {
    for (const auto& [alpha, name, tau] : table)
      out << short_real(alpha) << '\t' << name << '\t' << fixed(tau, args.output.digits) << '\n';
  }
  return 0;
}

// ---------------------------------------------------------------- discpower

struct DiscPowerArgs {
  DataArgs data;
  MetricArgs metric;
  OutputArgs output;
  std::vector<double> levels = {0.95, 0.99};
};

int run_discpower(const DiscPowerArgs& args, std::ostream& out, std::ostream& err) {
  const auto metrics = expand_metrics(args.metric, err);
  const Campaign campaign = load(args.data, args.output, err);
  const auto index = RarityIndex::build(campaign, parse_depth(args.data.rarity_depth));
  EvalOptions options;
  options.threads = args.output.threads;
  const auto matrices = evaluate_campaign(campaign, index, metrics, options);

  json rows = json::array();
  for (const auto& m : matrices)
    for (double level : args.levels) {
      const auto result = discriminative_power(m, level);
      rows.push_back({{"metric", m.metric.name()},
                      {"level", level},
                      {"pairs", result.significant_pairs},
                      {"total_pairs", result.total_pairs},
                      {"critical_difference", result.critical_difference},
                      {"residual_mean_square", result.residual_mean_square}});
      if (!args.output.as_json())
        out << m.metric.name() << '\t' << short_real(level) << '\t' << result.significant_pairs << '\t'
            << result.total_pairs << '\n';
    }
  if (args.output.as_json()) print_json(out, rows);
  return 0;
}

// ---------------------------------------------------------------- stability

struct StabilityArgs {
  DataArgs data;
  MetricArgs metric;
  OutputArgs output;
  std::optional<int> sample_size;
  int trials = 1000;
  std::uint64_t seed = kDefaultSeed;
  std::string direction = "winner";
};

int run_stability(const StabilityArgs& args, std::ostream& out, std::ostream& err) {
  const auto metrics = expand_metrics(args.metric, err);
  const Campaign campaign = load(args.data, args.output, err);
  const auto index = RarityIndex::build(campaign, parse_depth(args.data.rarity_depth));
  EvalOptions options;
  options.threads = args.output.threads;
  const auto matrices = evaluate_campaign(campaign, index, metrics, options);

  json rows = json::array();
  for (const auto& m : matrices) {
    StabilityConfig config;
    config.sample_size = args.sample_size.value_or(static_cast<int>(m.num_active_topics() / 2));
    config.trials = args.trials;
    config.seed = args.seed;
    config.direction =
        args.direction == "fullset" ? StabilityDirection::kFullSet : StabilityDirection::kWinner;
    config.threads = args.output.threads;
    const auto result = stability(m, config);

    json pairs = json::array();
    for (const auto& p : result.pairs)
      pairs.push_back({{"system_a", p.system_a}, {"system_b", p.system_b}, {"stability", p.stability},
                       {"wins_a", p.wins_a}, {"wins_b", p.wins_b}, {"ties", p.ties}});
    rows.push_back({{"metric", m.metric.name()}, {"overall", result.overall},
                    {"sample_size", config.sample_size}, {"trials", config.trials}, {"pairs", pairs}});
    if (!args.output.as_json()) {
      const std::string name = m.metric.name();
      out << name << "\toverall\t" << fixed(result.overall, args.output.digits) << '\n';
      for (const auto& p : result.pairs)
        out << name << '\t' << p.system_a << '\t' << p.system_b << '\t'
            << fixed(p.stability, args.output.digits) << '\n';
    }
  }
  if (args.output.as_json()) print_json(out, rows);
  return 0;
}

// ---------------------------------------------------------------- subset

struct SubsetArgs {
  DataArgs data;
  MetricArgs metric;
  OutputArgs output;
  std::vector<int> sizes = {2, 4, 8, 16, 32, 64};
  int trials = 1000;
  std::uint64_t seed = kDefaultSeed;
};

int run_subset(const SubsetArgs& args, std::ostream& out, std::ostream& err) {
  const auto metrics = expand_metrics(args.metric, err);
  if (metrics.size() != 1)
    throw UsageError("subset takes exactly one metric configuration (got " +
                     std::to_string(metrics.size()) + ")");
  const Campaign campaign = load(args.data, args.output, err);
  json rows = json::array();
  for (int n : args.sizes) {
    if (n > static_cast<int>(campaign.num_systems())) {
      err << "note: skipping N=" << n << " (campaign has " << campaign.num_systems() << " systems)\n";
      continue;
    }
    SubsetExperimentConfig config;
    config.subset_size = n;
    config.trials = args.trials;
    config.seed = args.seed;
    config.count_depth = parse_depth(args.data.rarity_depth);
    config.threads = args.output.threads;
    const auto result = subset_experiment(campaign, metrics.front(), config);
    if (result.resamples > 0)
      err << "note: N=" << n << " needed " << result.resamples << " resample(s) for tied subsets\n";
    rows.push_back({{"N", n}, {"mean_tau", result.mean_tau}, {"trials", result.trials},
                    {"resamples", result.resamples}, {"metric", metrics.front().name()}});
    if (!args.output.as_json())
      out << n << '\t' << fixed(result.mean_tau, args.output.digits) << '\t' << result.trials << '\n';
  }
  if (args.output.as_json()) print_json(out, rows);
  return 0;
}

// ---------------------------------------------------------------- synth

struct SynthArgs {
  SynthSpec spec;
  std::string out_dir;
};

int run_synth(const SynthArgs& args, std::ostream& out, std::ostream&) {
  namespace fs = std::filesystem;
  const Campaign campaign = generate_campaign(args.spec);
  const fs::path root(args.out_dir);
  fs::create_directories(root / "runs");
  for (const auto& run : campaign.runs()) {
    const fs::path path = root / "runs" / (run.system_id + ".run");
    std::ofstream file(path);
    if (!file) throw DataError("cannot write " + path.string());
    write_run(file, run);
    out << path.string() << '\n';
  }
  const fs::path qrels_path = root / "qrels.txt";
  std::ofstream qrels(qrels_path);
  if (!qrels) throw DataError("cannot write " + qrels_path.string());
  write_qrels(qrels, campaign.qrels());
  out << qrels_path.string() << '\n';
  return 0;
}

// ---------------------------------------------------------------- trajectory

struct TrajectoryArgs {
  DataArgs data;
  MetricArgs metric;
  OutputArgs output;
  std::string kind = "rare";
  std::vector<std::string> topics;
  int d_max = 45;
  std::string pad = "pool-nonrel";
  bool freeze_nr = false;
};

int run_trajectory(const TrajectoryArgs& args, std::ostream& out, std::ostream& err) {
  if (args.metric.metrics.size() != 1) throw UsageError("trajectory takes exactly one metric");
  MetricDefaults defaults;
  defaults.cutoff = args.metric.cutoff;
  if (args.metric.rarity) defaults.rarity = parse_rarity_variant(*args.metric.rarity);
  defaults.ap_depth = args.metric.ap_depth == "full" ? ApDepth::kFull : ApDepth::kCutoff;
  const MetricConfig metric = parse_metric(args.metric.metrics.front(), defaults);

  const Campaign campaign = load(args.data, args.output, err);
  TrajectoryOptions options;
  options.topics = args.topics;
  if (options.topics.empty()) {
    auto judged = campaign.qrels().topics();
    if (judged.empty()) throw DataError("no judged topics");
    options.topics.push_back(judged.front());
  }
  options.D_max = args.d_max;
  options.count_depth = parse_depth(args.data.rarity_depth);
  options.freeze_num_relevant = args.freeze_nr;
  options.hypothetical.pad = args.pad == "none" ? PadPolicy::kNone : PadPolicy::kPoolNonRelevant;
  options.hypothetical.pad_depth = metric.cutoff;
  options.threads = args.output.threads;

  const auto kind = args.kind == "common" ? HypotheticalKind::kCommon : HypotheticalKind::kRare;
  const auto results = rank_trajectory(campaign, kind, args.metric.alphas, metric, options);

  json rows = json::array();
  for (const auto& r : results) {
    json points = json::array();
    for (const auto& p : r.points) {
      points.push_back({{"D", p.D}, {"rank", p.rank}, {"score", p.score}});
      if (!args.output.as_json()) out << short_real(r.alpha) << '\t' << p.D << '\t' << fixed(p.rank, 1) << '\n';
    }
    rows.push_back({{"alpha", r.alpha},
                    {"first_rank_one", r.first_rank_one ? json(*r.first_rank_one) : json(nullptr)},
                    {"points", points}});
    err << "alpha=" << short_real(r.alpha) << ": ";
    if (r.first_rank_one)
      err << "rank 1 first reached at D=" << *r.first_rank_one << '\n';
    else
      err << "rank 1 not reached up to D=" << (r.points.empty() ? 0 : r.points.back().D) << '\n';
  }
  if (args.output.as_json()) print_json(out, rows);
  return 0;
}

// ---------------------------------------------------------------- report

struct ReportArgs {
  DataArgs data;
  OutputArgs output;
  std::vector<std::string> topics;
  std::string rarity = "eq2";
};

int run_report(const ReportArgs& args, std::ostream& out, std::ostream& err) {
  const Campaign campaign = load(args.data, args.output, err);
  const auto index = RarityIndex::build(campaign, parse_depth(args.data.rarity_depth));
  const auto variant = parse_rarity_variant(args.rarity);
  const auto topics = args.topics.empty() ? campaign.qrels().topics() : args.topics;
  json rows = json::array();
  for (const auto& topic : topics)
    for (const auto& row : rarity_report(campaign, index, topic, variant)) {
      rows.push_back({{"topic", topic}, {"doc", row.doc}, {"grade", row.grade}, {"S_d", row.count},
                      {"rarity", row.rarity}});
      if (!args.output.as_json())
        out << topic << '\t' << row.doc << '\t' << row.grade << '\t' << row.count << '\t'
            << fixed(row.rarity, args.output.digits) << '\n';
    }
  if (args.output.as_json()) print_json(out, rows);
  return 0;
}

}  // namespace

int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Rareness-weighted retrieval evaluation", "rareval"};
  app.require_subcommand(1);

  EvalArgs eval;
  auto* eval_cmd = app.add_subcommand("eval", "Score every system on every topic");
  add_data_options(eval_cmd, eval.data);
  add_metric_options(eval_cmd, eval.metric, {"P@k", "AP", "P@k_rareness", "AP_rareness"}, {0.5, 1.0});
  add_output_options(eval_cmd, eval.output);
  eval_cmd->add_flag("--summary", eval.summary_only, "Only print per-system means (topic ALL)");

  CompareArgs compare;
  auto* compare_cmd = app.add_subcommand("compare", "Kendall's tau between base and rareness rankings");
  add_data_options(compare_cmd, compare.data);
  add_metric_options(compare_cmd, compare.metric, {"P@k_rareness", "AP_rareness"}, kAlphaGrid);
  add_output_options(compare_cmd, compare.output);

  DiscPowerArgs disc;
  auto* disc_cmd = app.add_subcommand("discpower", "Tukey HSD discriminative power");
  add_data_options(disc_cmd, disc.data);
  add_metric_options(disc_cmd, disc.metric, {"P@k", "P@k_rareness", "AP", "AP_rareness"}, {0.5, 1.0});
  add_output_options(disc_cmd, disc.output);
  disc_cmd->add_option("--levels", disc.levels, "Confidence levels")
      ->capture_default_str()
      ->delimiter(',')
      ->check(CLI::Range(0.5, 0.9999));

  StabilityArgs stab;
  auto* stab_cmd = app.add_subcommand("stability", "Topic-subsampling stability of pairwise orderings");
  add_data_options(stab_cmd, stab.data);
  add_metric_options(stab_cmd, stab.metric, {"P@k", "P@k_rareness", "AP", "AP_rareness"}, {0.5, 1.0});
  add_output_options(stab_cmd, stab.output);
  stab_cmd->add_option("--sample-size", stab.sample_size, "Topics per trial (default: half the topics)")
      ->check(CLI::PositiveNumber);
  stab_cmd->add_option("--trials", stab.trials, "Trials")->capture_default_str()->check(CLI::PositiveNumber);
  stab_cmd->add_option("--seed", stab.seed, "Random seed")->capture_default_str();
  stab_cmd->add_option("--stability-direction", stab.direction,
                       "winner: winning side's share; fullset: agreement with all-topic order")
      ->capture_default_str()
      ->check(CLI::IsMember({"winner", "fullset"}));

  SubsetArgs subset;
  auto* subset_cmd = app.add_subcommand("subset", "Ranking robustness to the set of participants");
  add_data_options(subset_cmd, subset.data);
  add_metric_options(subset_cmd, subset.metric, {"P@k_rareness"}, {1.0});
  add_output_options(subset_cmd, subset.output);
  subset_cmd->add_option("--sizes", subset.sizes, "Subset sizes N")
      ->capture_default_str()
      ->delimiter(',')
      ->check(CLI::Range(2, 1 << 20));
  subset_cmd->add_option("--trials", subset.trials, "Trials per N")->capture_default_str()->check(CLI::PositiveNumber);
  subset_cmd->add_option("--seed", subset.seed, "Random seed")->capture_default_str();

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic campaign as run/qrels files");
  synth_cmd->add_option("--out", synth.out_dir, "Output directory")->required();
  synth_cmd->add_option("--systems", synth.spec.n_systems, "Systems")->capture_default_str();
  synth_cmd->add_option("--topics", synth.spec.n_topics, "Topics")->capture_default_str();
  synth_cmd->add_option("--relevant", synth.spec.n_relevant_per_topic, "Relevant documents per topic")
      ->capture_default_str();
  synth_cmd->add_option("--pool", synth.spec.doc_pool_size, "Documents per topic pool")->capture_default_str();
  synth_cmd->add_option("--overlap", synth.spec.overlap_bias, "Overlap bias in [0, 1]")->capture_default_str();
  synth_cmd->add_option("--depth", synth.spec.run_depth, "Run depth")->capture_default_str();
  synth_cmd->add_option("--seed", synth.spec.seed, "Random seed")->capture_default_str();

  TrajectoryArgs traj;
  auto* traj_cmd = app.add_subcommand("trajectory", "Rank of a hypothetical S_rare / S_common system vs D");
  add_data_options(traj_cmd, traj.data);
  add_metric_options(traj_cmd, traj.metric, {"P@k_rareness"}, {0.0, 0.5, 1.0});
  add_output_options(traj_cmd, traj.output);
  traj_cmd->add_option("--kind", traj.kind, "rare or common")
      ->capture_default_str()
      ->check(CLI::IsMember({"rare", "common"}));
  traj_cmd->add_option("--topic", traj.topics, "Topic(s) the hypothetical system answers")->delimiter(',');
  traj_cmd->add_option("--d-max", traj.d_max, "Largest D")->capture_default_str()->check(CLI::PositiveNumber);
  traj_cmd->add_option("--pad", traj.pad, "Padding of hypothetical runs: none or pool-nonrel")
      ->capture_default_str()
      ->check(CLI::IsMember({"none", "pool-nonrel"}));
  traj_cmd->add_flag("--freeze-nr", traj.freeze_nr, "Keep N_R fixed when S_rare adds relevant documents");

  ReportArgs report;
  auto* report_cmd = app.add_subcommand("report", "Rarity of each relevant retrieved document");
  add_data_options(report_cmd, report.data);
  add_output_options(report_cmd, report.output);
  report_cmd->add_option("--topic", report.topics, "Topic(s); default all judged topics")->delimiter(',');
  report_cmd->add_option("--rarity", report.rarity, "eq2 or revised")
      ->capture_default_str()
      ->check(CLI::IsMember({"eq2", "revised"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (eval_cmd->parsed()) return run_eval(eval, out, err);
    if (compare_cmd->parsed()) return run_compare(compare, out, err);
    if (disc_cmd->parsed()) return run_discpower(disc, out, err);
    if (stab_cmd->parsed()) return run_stability(stab, out, err);
    if (subset_cmd->parsed()) return run_subset(subset, out, err);
    if (synth_cmd->parsed()) return run_synth(synth, out, err);
    if (traj_cmd->parsed()) return run_trajectory(traj, out, err);
    if (report_cmd->parsed()) return run_report(report, out, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace rareval::cli
