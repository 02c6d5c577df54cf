#include "rareval/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>

#include "rareval/error.hpp"

namespace rareval {
namespace {

std::string format_real(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", value);
  return buf;
}

std::string unknown_metric_message(std::string_view name, std::string_view detail) {
  std::string msg = "unknown metric '" + std::string(name) + "'";
  if (!detail.empty()) msg += " (" + std::string(detail) + ")";
  msg += "; valid names:";
  for (const auto& valid : valid_metric_names()) msg += " " + valid;
  return msg;
}

template <typename T>
std::optional<T> to_number(std::string_view text) {
  T value{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) return std::nullopt;
  return value;
}

}  // namespace

void MetricConfig::validate() const {
  if (cutoff < 1) throw ConfigError("cutoff k must be >= 1");
  if (!std::isfinite(alpha) || alpha < 0.0) throw ConfigError("alpha must be a finite value >= 0");
  if (formulation == Formulation::kMixture) {
    if (family != MetricFamily::kPrecision)
      throw ConfigError("the mixture formulation is only defined for P@k");
    if (alpha > 1.0) throw ConfigError("mixture formulation requires alpha in [0, 1]");
  }
}

std::string MetricConfig::base_name() const {
  std::string name = family == MetricFamily::kPrecision ? "P@" + std::to_string(cutoff) : "AP";
  switch (formulation) {
    case Formulation::kStandard: break;
    case Formulation::kAdditive: name += "_rareness"; break;
    case Formulation::kMixture: name += "_mixture"; break;
  }
  return name;
}

std::string MetricConfig::name() const {
  std::vector<std::string> params;
  if (uses_rarity()) {
    params.push_back("alpha=" + format_real(alpha));
    params.push_back("rarity=" + std::string(to_string(rarity)));
  }
  if (family == MetricFamily::kAveragePrecision) {
    if (cutoff != 100) params.push_back("k=" + std::to_string(cutoff));
    if (ap_depth == ApDepth::kFull) params.push_back("depth=full");
  }
  std::string out = base_name();
  if (!params.empty()) {
    out += '(';
    for (std::size_t i = 0; i < params.size(); ++i) out += (i ? "," : "") + params[i];
    out += ')';
  }
  return out;
}

std::vector<std::string> valid_metric_names() {
  return {"P@k", "AP", "P@k_rareness", "AP_rareness", "P@k_mixture"};
}

MetricConfig parse_metric(std::string_view name, const MetricDefaults& defaults) {
  std::string_view base = name;
  std::string_view params;
  if (auto open = name.find('('); open != std::string_view::npos) {
    if (name.back() != ')') throw ConfigError(unknown_metric_message(name, "unbalanced parentheses"));
    base = name.substr(0, open);
    params = name.substr(open + 1, name.size() - open - 2);
  }

  MetricConfig config;
  config.cutoff = defaults.cutoff;
  config.alpha = defaults.alpha;
  config.ap_depth = defaults.ap_depth;
  config.skip_empty_topics = defaults.skip_empty_topics;

  std::string_view head = base;
  if (head.ends_with("_rareness")) {
    config.formulation = Formulation::kAdditive;
    head.remove_suffix(9);
  } else if (head.ends_with("_mixture")) {
    config.formulation = Formulation::kMixture;
    head.remove_suffix(8);
  }

  if (head == "AP") {
    config.family = MetricFamily::kAveragePrecision;
    if (config.formulation == Formulation::kMixture)
      throw ConfigError(unknown_metric_message(name, "no mixture form of AP"));
  } else if (head.starts_with("P@")) {
    config.family = MetricFamily::kPrecision;
    auto k_text = head.substr(2);
    if (k_text != "k") {
      auto k = to_number<int>(k_text);
      if (!k || *k < 1) throw ConfigError(unknown_metric_message(name, "bad cutoff"));
      config.cutoff = *k;
    }
  } else {
    throw ConfigError(unknown_metric_message(name, ""));
  }

  std::optional<RarityVariant> rarity = defaults.rarity;
  while (!params.empty()) {
    auto comma = params.find(',');
    auto item = params.substr(0, comma);
    params = comma == std::string_view::npos ? std::string_view{} : params.substr(comma + 1);
    auto eq = item.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError(unknown_metric_message(name, "parameter without '='"));
    auto key = item.substr(0, eq);
    auto value = item.substr(eq + 1);
    if (key == "alpha") {
      auto a = to_number<double>(value);
      if (!a) throw ConfigError(unknown_metric_message(name, "bad alpha"));
      config.alpha = *a;
    } else if (key == "rarity") {
      rarity = parse_rarity_variant(value);
    } else if (key == "k") {
      auto k = to_number<int>(value);
      if (!k || *k < 1) throw ConfigError(unknown_metric_message(name, "bad k"));
      config.cutoff = *k;
    } else if (key == "depth") {
      if (value == "cutoff")
        config.ap_depth = ApDepth::kCutoff;
      else if (value == "full")
        config.ap_depth = ApDepth::kFull;
      else
        throw ConfigError(unknown_metric_message(name, "depth must be cutoff or full"));
    } else {
      throw ConfigError(unknown_metric_message(name, "unknown parameter '" + std::string(key) + "'"));
    }
  }

  if (config.formulation == Formulation::kStandard) {
    config.alpha = 0.0;
  } else {
    config.rarity = rarity.value_or(config.formulation == Formulation::kMixture
                                        ? RarityVariant::kRevised
                                        : RarityVariant::kEq2);
  }
  config.validate();
  return config;
}

MetricConfig base_metric(const MetricConfig& config) {
  MetricConfig base = config;
  base.formulation = Formulation::kStandard;
  base.alpha = 0.0;
  base.rarity = RarityVariant::kEq2;
  return base;
}

double precision_at_k(std::span<const JudgedDoc> ranking, int k) {
  const std::size_t n = std::min(ranking.size(), static_cast<std::size_t>(k));
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    if (ranking[i].relevant) sum += 1.0;
  return sum / k;
}

double p_at_k_rareness(std::span<const JudgedDoc> ranking, int k, double alpha) {
  const std::size_t n = std::min(ranking.size(), static_cast<std::size_t>(k));
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    if (ranking[i].relevant) sum += 1.0 + alpha * ranking[i].rarity;
  return sum / k;
}

double p_at_k_mixture(std::span<const JudgedDoc> ranking, int k, double alpha) {
  const std::size_t n = std::min(ranking.size(), static_cast<std::size_t>(k));
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    if (ranking[i].relevant) sum += (1.0 - alpha) + alpha * ranking[i].rarity;
  return sum / k;
}

std::optional<double> average_precision(std::span<const JudgedDoc> ranking, std::size_t depth,
                                        int num_relevant) {
  if (num_relevant <= 0) return std::nullopt;
  const std::size_t n = std::min(ranking.size(), depth);
  double hits = 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!ranking[i].relevant) continue;
    hits += 1.0;
    total += hits / static_cast<double>(i + 1);
  }
  return total / num_relevant;
}

std::optional<double> ap_rareness(std::span<const JudgedDoc> ranking, std::size_t depth,
                                  double alpha, int num_relevant) {
  if (num_relevant <= 0) return std::nullopt;
  const std::size_t n = std::min(ranking.size(), depth);
  // Running numerator of P@i_rareness, so the whole sum is O(depth).
  double gain = 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!ranking[i].relevant) continue;
    gain += 1.0 + alpha * ranking[i].rarity;
    total += gain / static_cast<double>(i + 1);
  }
  return total / num_relevant;
}

std::size_t judged_depth(const MetricConfig& config, std::size_t ranking_size) {
  if (config.family == MetricFamily::kAveragePrecision && config.ap_depth == ApDepth::kFull)
    return ranking_size;
  return std::min(ranking_size, static_cast<std::size_t>(config.cutoff));
}

std::optional<double> score_topic(const MetricConfig& config, std::span<const JudgedDoc> ranking,
                                  int num_relevant) {
  if (config.family == MetricFamily::kAveragePrecision) {
    const std::size_t depth = judged_depth(config, ranking.size());
    if (config.formulation == Formulation::kStandard)
      return average_precision(ranking, depth, num_relevant);
    return ap_rareness(ranking, depth, config.alpha, num_relevant);
  }
  if (config.skip_empty_topics && num_relevant <= 0) return std::nullopt;
  switch (config.formulation) {
    case Formulation::kStandard: return precision_at_k(ranking, config.cutoff);
    case Formulation::kAdditive: return p_at_k_rareness(ranking, config.cutoff, config.alpha);
    case Formulation::kMixture: return p_at_k_mixture(ranking, config.cutoff, config.alpha);
  }
  return std::nullopt;
}

std::vector<JudgedDoc> judge_ranking(const std::vector<RankedDoc>& ranking, const Qrels& qrels,
                                     const std::string& topic, const RarityIndex& index,
                                     RarityVariant variant, std::size_t depth) {
  const std::size_t n = std::min(ranking.size(), depth);
  std::vector<JudgedDoc> judged(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!qrels.is_relevant(topic, ranking[i].doc)) continue;
    const int c = effective_count(index.count(topic, ranking[i].doc), i, index.count_depth());
    if (c == 0)
      throw UndefinedError("document '" + ranking[i].doc + "' of topic '" + topic +
                           "' is unknown to the rarity index");
    judged[i] = JudgedDoc{true, rarity_value(c, index.total_systems(), variant)};
  }
  return judged;
}

std::optional<double> score_ranking(const MetricConfig& config,
                                    const std::vector<RankedDoc>& ranking, const Qrels& qrels,
                                    const std::string& topic, const RarityIndex& index) {
  config.validate();
  const std::size_t depth = judged_depth(config, ranking.size());
  std::vector<JudgedDoc> judged;
  if (config.uses_rarity()) {
    judged = judge_ranking(ranking, qrels, topic, index, config.rarity, depth);
  } else {
    judged.resize(depth);
    for (std::size_t i = 0; i < depth; ++i) judged[i].relevant = qrels.is_relevant(topic, ranking[i].doc);
  }
  return score_topic(config, judged, qrels.num_relevant(topic));
}

}  // namespace rareval
