#pragma once

// Standard and rareness-weighted effectiveness for one ranking on one topic.
//
//   P@k            (1/k)   sum_{i<=k} Rel(d_i)
//   P@k_rareness   (1/k)   sum_{i<=k} Rel(d_i) (1 + alpha R(d_i))
//   P@k_mixture    (1/k)   sum_{i<=k} (1 - alpha) Rel(d_i) + alpha Rel(d_i) R(d_i)
//   AP             (1/N_R) sum_{i<=k} Rel(d_i) P@i
//   AP_rareness    (1/N_R) sum_{i<=k} Rel(d_i) P@i_rareness
//
// Positions past the end of a ranking count as non-relevant. Sums run in rank
// order, so alpha = 0 reproduces the standard metric bit for bit.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rareval/rarity.hpp"
#include "rareval/trec_io.hpp"

namespace rareval {

enum class MetricFamily { kPrecision, kAveragePrecision };
enum class Formulation { kStandard, kAdditive, kMixture };
enum class ApDepth { kCutoff, kFull };

struct MetricConfig {
  MetricFamily family = MetricFamily::kPrecision;
  Formulation formulation = Formulation::kStandard;
  int cutoff = 100;
  double alpha = 0.0;
  RarityVariant rarity = RarityVariant::kEq2;
  ApDepth ap_depth = ApDepth::kCutoff;
  // Exclude topics without relevant documents from P@k-family means. The
  // AP family always excludes them.
  bool skip_empty_topics = false;

  // Throws ConfigError.
  void validate() const;
  bool uses_rarity() const { return formulation != Formulation::kStandard; }
  bool skips_empty_topics() const {
    return family == MetricFamily::kAveragePrecision || skip_empty_topics;
  }
  // Additive formulation with alpha > 1: allowed, but outside the
  // recommended range.
  bool alpha_out_of_recommended_range() const {
    return formulation == Formulation::kAdditive && alpha > 1.0;
  }

  // "P@100", "AP_rareness", ...
  std::string base_name() const;
  // Fully parameterized, e.g. "P@100_rareness(alpha=0.5,rarity=eq2)".
  std::string name() const;

  bool operator==(const MetricConfig&) const = default;
};

// Values a metric name does not carry itself.
struct MetricDefaults {
  int cutoff = 100;
  double alpha = 0.0;
  // nullopt: eq2 for the additive formulation, revised for the mixture.
  std::optional<RarityVariant> rarity;
  ApDepth ap_depth = ApDepth::kCutoff;
  bool skip_empty_topics = false;
};

// Parses "P@100", "P@k", "AP", "P@100_rareness", "AP_rareness",
// "P@100_mixture", optionally followed by "(alpha=..,rarity=..,k=..,depth=..)".
// Throws ConfigError listing the valid names on failure.
MetricConfig parse_metric(std::string_view name, const MetricDefaults& defaults = {});
std::vector<std::string> valid_metric_names();

// The standard metric a rareness metric generalizes.
MetricConfig base_metric(const MetricConfig& config);

// One ranked position as the metric sees it. `rarity` is only read when
// `relevant` is set.
struct JudgedDoc {
  bool relevant = false;
  double rarity = 0.0;
};

double precision_at_k(std::span<const JudgedDoc> ranking, int k);
double p_at_k_rareness(std::span<const JudgedDoc> ranking, int k, double alpha);
double p_at_k_mixture(std::span<const JudgedDoc> ranking, int k, double alpha);
// nullopt when num_relevant == 0 (topic skipped). `depth` bounds the sum.
std::optional<double> average_precision(std::span<const JudgedDoc> ranking, std::size_t depth,
                                        int num_relevant);
std::optional<double> ap_rareness(std::span<const JudgedDoc> ranking, std::size_t depth,
                                  double alpha, int num_relevant);

// How many leading positions of a ranking of length `ranking_size` the metric
// reads.
std::size_t judged_depth(const MetricConfig& config, std::size_t ranking_size);

// Dispatches on config; nullopt means the topic is skipped.
std::optional<double> score_topic(const MetricConfig& config, std::span<const JudgedDoc> ranking,
                                  int num_relevant);

// S_d seen by the system being evaluated for a document at 0-based
// `position`: the system always counts itself, including when the document
// lies beyond the counting depth.
inline int effective_count(int indexed_count, std::size_t position,
                           std::optional<int> count_depth) {
  const bool self_counted = !count_depth || position < static_cast<std::size_t>(*count_depth);
  return self_counted ? indexed_count : indexed_count + 1;
}

// Judges the first `depth` entries of `ranking` against qrels and the index.
// Throws UndefinedError if a relevant document is unknown to the index.
std::vector<JudgedDoc> judge_ranking(const std::vector<RankedDoc>& ranking, const Qrels& qrels,
                                     const std::string& topic, const RarityIndex& index,
                                     RarityVariant variant, std::size_t depth);

// Scores one run's ranking for one topic.
std::optional<double> score_ranking(const MetricConfig& config,
                                    const std::vector<RankedDoc>& ranking, const Qrels& qrels,
                                    const std::string& topic, const RarityIndex& index);

}  // namespace rareval
