#include "rareval/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <unordered_set>

#include "rareval/error.hpp"
#include "rareval/rarity.hpp"

namespace rareval {
namespace {

// Share of the relevant slots every system fills when overlap_bias = 1.
constexpr double kSharedRelevantRate = 0.5;
// Non-relevant documents ranked this high by any run get judged (grade 0).
constexpr int kPoolJudgeDepth = 10;

std::string numbered(const char* prefix, int value, int width) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s%0*d", prefix, width, value);
  return buf;
}

double quantize(double score) { return std::round(score * 1e6) / 1e6; }

// Builds a ranked run body from documents already in canonical order.
std::vector<RankedDoc> ranked(const std::vector<std::string>& docs) {
  std::vector<RankedDoc> out;
  out.reserve(docs.size());
  const double n = static_cast<double>(docs.size());
  for (std::size_t i = 0; i < docs.size(); ++i)
    out.push_back(RankedDoc{docs[i], n - static_cast<double>(i), static_cast<long>(i + 1)});
  return out;
}

void pad(std::vector<std::string>& docs, const TopicTable* table, int D,
         const HypotheticalOptions& options) {
  if (options.pad == PadPolicy::kNone || table == nullptr) return;
  const std::size_t target = static_cast<std::size_t>(std::max(D, options.pad_depth));
  std::vector<std::string> filler;
  for (std::size_t d = 0; d < table->doc_ids.size(); ++d)
    if (!table->relevant[d]) filler.push_back(table->doc_ids[d]);
  std::sort(filler.begin(), filler.end());
  for (const auto& doc : filler) {
    if (docs.size() >= target) break;
    docs.push_back(doc);
  }
}

const TopicTable* find_table(const Campaign& campaign, const std::string& topic) {
  auto idx = campaign.topic_index(topic);
  return idx ? &campaign.topics()[*idx] : nullptr;
}

// Relevant retrieved documents of a topic, most widely retrieved first.
std::vector<std::pair<std::string, int>> common_order(const Campaign& campaign,
                                                      const std::string& topic) {
  std::vector<std::pair<std::string, int>> docs;
  auto idx = campaign.topic_index(topic);
  if (!idx) return docs;
  const auto index = RarityIndex::build(campaign);
  const auto& table = campaign.topics()[*idx];
  for (std::size_t d = 0; d < table.doc_ids.size(); ++d) {
    if (!table.relevant[d]) continue;
    const int c = index.count(*idx, static_cast<int>(d));
    if (c > 0) docs.emplace_back(table.doc_ids[d], c);
  }
  std::sort(docs.begin(), docs.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  return docs;
}

}  // namespace

void SynthSpec::validate() const {
  if (n_systems < 1) throw ConfigError("synth: n_systems must be >= 1");
  if (n_topics < 1) throw ConfigError("synth: n_topics must be >= 1");
  if (n_relevant_per_topic < 1) throw ConfigError("synth: n_relevant_per_topic must be >= 1");
  if (run_depth < 1) throw ConfigError("synth: run_depth must be >= 1");
  if (n_relevant_per_topic > doc_pool_size)
    throw ConfigError("synth: n_relevant_per_topic exceeds doc_pool_size");
  if (run_depth > doc_pool_size) throw ConfigError("synth: run_depth exceeds doc_pool_size");
  if (!(overlap_bias >= 0.0 && overlap_bias <= 1.0))
    throw ConfigError("synth: overlap_bias must lie in [0, 1]");
}

Campaign generate_campaign(const SynthSpec& spec) {
  spec.validate();
  const int width_sys = spec.n_systems >= 1000 ? 4 : 3;
  const int width_top = spec.n_topics >= 1000 ? 4 : 3;

  // System quality: how many relevant documents it finds and how high it
  // ranks them.
  std::vector<double> quality(static_cast<std::size_t>(spec.n_systems));
  {
    Rng rng = substream(spec.seed, 0);
    std::uniform_real_distribution<double> u(0.1, 0.7);
    for (auto& q : quality) q = u(rng);
  }

  std::vector<Run> runs(static_cast<std::size_t>(spec.n_systems));
  for (int s = 0; s < spec.n_systems; ++s) runs[static_cast<std::size_t>(s)].system_id = numbered("sys", s + 1, width_sys);
  Qrels qrels(1);

  const int M = std::min(spec.n_relevant_per_topic, spec.run_depth);
  const double b = spec.overlap_bias;

  for (int t = 0; t < spec.n_topics; ++t) {
    const std::string topic = numbered("T", t + 1, width_top);
    std::vector<std::string> pool(static_cast<std::size_t>(spec.doc_pool_size));
    for (int d = 0; d < spec.doc_pool_size; ++d)
      pool[static_cast<std::size_t>(d)] = topic + "-" + numbered("d", d, 6);

    // Which pool documents are relevant, in descending popularity.
    Rng topic_rng = substream(spec.seed, 1, static_cast<std::uint64_t>(t));
    std::shuffle(pool.begin(), pool.end(), topic_rng);
    const std::vector<std::string> popular(pool.begin(), pool.begin() + spec.n_relevant_per_topic);
    const std::vector<std::string> non_relevant(pool.begin() + spec.n_relevant_per_topic, pool.end());
    for (const auto& doc : popular) qrels.add(topic, doc, 1);

    std::set<std::string> judged_non_relevant;
    for (int s = 0; s < spec.n_systems; ++s) {
      Rng rng = substream(spec.seed, 2 + static_cast<std::uint64_t>(t), static_cast<std::uint64_t>(s));
      std::normal_distribution<double> noise(0.0, 1.0);
      std::uniform_real_distribution<double> u01(0.0, 1.0);
      const double q = quality[static_cast<std::size_t>(s)];
      const double rate = std::clamp(q + 0.1 * noise(rng), 0.02, 0.98);
      const int m = static_cast<int>(std::lround(((1.0 - b) * rate + b * kSharedRelevantRate) * M));

      std::vector<std::uint8_t> taken(popular.size(), 0);
      std::size_t next_popular = 0;
      std::vector<std::size_t> picks;
      std::uniform_int_distribution<std::size_t> any(0, popular.size() - 1);
      for (int j = 0; j < m; ++j) {
        std::size_t pick;
        if (b >= 1.0 || u01(rng) < b) {
          while (taken[next_popular]) ++next_popular;
          pick = next_popular;
        } else {
          do pick = any(rng);
          while (taken[pick]);
        }
        taken[pick] = 1;
        picks.push_back(pick);
      }

      std::vector<RankedDoc> entries;
      const double mean_relevant = 2.5 * q;
      for (std::size_t p : picks)
        entries.push_back(RankedDoc{popular[p], quantize(mean_relevant + noise(rng)), 0});
      const std::size_t fill = std::min(non_relevant.size(), static_cast<std::size_t>(spec.run_depth - m));
      for (std::size_t idx : sample_without_replacement(rng, non_relevant.size(), fill))
        entries.push_back(RankedDoc{non_relevant[idx], quantize(noise(rng)), 0});

      canonicalize(entries);
      for (std::size_t i = 0; i < entries.size(); ++i) {
        entries[i].rank = static_cast<long>(i + 1);
        if (i < static_cast<std::size_t>(kPoolJudgeDepth) && !qrels.is_relevant(topic, entries[i].doc))
          judged_non_relevant.insert(entries[i].doc);
      }
      runs[static_cast<std::size_t>(s)].rankings.emplace(topic, std::move(entries));
    }
    for (const auto& doc : judged_non_relevant) qrels.add(topic, doc, 0);
  }
  return Campaign(std::move(runs), std::move(qrels));
}

std::pair<Run, Qrels> make_s_rare(const Campaign& campaign, const std::string& topic, int D,
                                  const HypotheticalOptions& options) {
  if (D < 1) throw ConfigError("S_rare needs D >= 1");
  const TopicTable* table = find_table(campaign, topic);
  Qrels qrels = campaign.qrels();
  const int grade = qrels.threshold();

  std::vector<std::string> docs;
  for (int i = 1; i <= D; ++i) {
    std::string doc = kRareDocPrefix + topic + ":" + std::to_string(i);
    if ((table && table->find(doc)) || qrels.grade(topic, doc))
      throw DataError("synthetic document id '" + doc + "' collides with an existing document");
    qrels.add(topic, doc, grade);
    docs.push_back(std::move(doc));
  }
  pad(docs, table, D, options);

  Run run;
  run.system_id = kRareSystemId;
  run.rankings.emplace(topic, ranked(docs));
  return {std::move(run), std::move(qrels)};
}

int available_common_documents(const Campaign& campaign, const std::string& topic) {
  return static_cast<int>(common_order(campaign, topic).size());
}

Run make_s_common(const Campaign& campaign, const std::string& topic, int D,
                  const HypotheticalOptions& options) {
  if (D < 1) throw ConfigError("S_common needs D >= 1");
  const auto order = common_order(campaign, topic);
  if (static_cast<std::size_t>(D) > order.size())
    throw ConfigError("S_common: D=" + std::to_string(D) + " exceeds the " +
                      std::to_string(order.size()) + " relevant documents retrieved for topic '" +
                      topic + "' (maximum D is " + std::to_string(order.size()) + ")");
  std::vector<std::string> docs;
  for (int i = 0; i < D; ++i) docs.push_back(order[static_cast<std::size_t>(i)].first);
  pad(docs, find_table(campaign, topic), D, options);

  Run run;
  run.system_id = kCommonSystemId;
  run.rankings.emplace(topic, ranked(docs));
  return run;
}

std::vector<TrajectoryResult> rank_trajectory(const Campaign& campaign, HypotheticalKind kind,
                                              const std::vector<double>& alphas,
                                              const MetricConfig& metric,
                                              const TrajectoryOptions& options) {
  if (options.topics.empty()) throw ConfigError("trajectory needs at least one topic");
  if (options.D_max < 1) throw ConfigError("trajectory needs D_max >= 1");
  if (alphas.empty()) throw ConfigError("trajectory needs at least one alpha");
  const std::string hypothetical_id = kind == HypotheticalKind::kRare ? kRareSystemId : kCommonSystemId;
  if (campaign.system_index(hypothetical_id))
    throw DataError("campaign already contains a system named '" + hypothetical_id + "'");

  std::vector<MetricConfig> configs;
  for (double alpha : alphas) {
    MetricConfig c = metric;
    if (c.formulation == Formulation::kStandard) c.formulation = Formulation::kAdditive;
    c.alpha = alpha;
    c.validate();
    configs.push_back(c);
  }

  int D_max = options.D_max;
  if (kind == HypotheticalKind::kCommon)
    for (const auto& topic : options.topics)
      D_max = std::min(D_max, available_common_documents(campaign, topic));

  // Only the probed topics matter: rarity is per topic.
  std::vector<Run> base_runs;
  for (const auto& run : campaign.runs()) {
    Run trimmed;
    trimmed.system_id = run.system_id;
    for (const auto& topic : options.topics) {
      auto it = run.rankings.find(topic);
      if (it != run.rankings.end()) trimmed.rankings.emplace(topic, it->second);
    }
    base_runs.push_back(std::move(trimmed));
  }

  EvalOptions eval_options;
  eval_options.topics = options.topics;
  eval_options.threads = options.threads;
  if (options.freeze_num_relevant)
    for (const auto& topic : options.topics)
      eval_options.frozen_num_relevant[topic] = campaign.qrels().num_relevant(topic);

  std::vector<TrajectoryResult> results(alphas.size());
  for (std::size_t a = 0; a < alphas.size(); ++a) results[a].alpha = alphas[a];

  for (int D = 1; D <= D_max; ++D) {
    Run hypothetical;
    hypothetical.system_id = hypothetical_id;
    Qrels qrels = campaign.qrels();
    for (const auto& topic : options.topics) {
      Run part;
      if (kind == HypotheticalKind::kRare) {
        auto [run, augmented] = make_s_rare(campaign, topic, D, options.hypothetical);
        part = std::move(run);
        for (const auto& [doc, grade] : augmented.judgments().at(topic)) qrels.add(topic, doc, grade);
      } else {
        part = make_s_common(campaign, topic, D, options.hypothetical);
      }
      for (auto& [t, ranking] : part.rankings) hypothetical.rankings.emplace(t, std::move(ranking));
    }
    std::vector<Run> runs = base_runs;
    runs.push_back(std::move(hypothetical));
    const Campaign joined(std::move(runs), std::move(qrels));
    const auto index = RarityIndex::build(joined, options.count_depth);
    const auto matrices = evaluate_campaign(joined, index, configs, eval_options);

    for (std::size_t a = 0; a < configs.size(); ++a) {
      const auto ranking = rank_systems(matrices[a]);
      TrajectoryPoint point;
      point.D = D;
      point.rank = *ranking.rank_of(hypothetical_id);
      for (const auto& e : ranking.entries)
        if (e.system_id == hypothetical_id) point.score = e.mean;
      if (point.rank == 1.0 && !results[a].first_rank_one) results[a].first_rank_one = D;
      results[a].points.push_back(point);
    }
  }
  return results;
}

}  // namespace rareval
