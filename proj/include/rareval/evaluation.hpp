#pragma once

// Whole-campaign evaluation: score every (system, topic) cell, aggregate to
// per-system means and rank systems.
//
// evaluate_campaign() fills cells with OpenMP; reference::evaluate_campaign()
// is the sequential loop kept as the yardstick for tests and benchmarks. Both
// produce identical matrices.

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rareval/metrics.hpp"
#include "rareval/rarity.hpp"
#include "rareval/trec_io.hpp"

namespace rareval {

struct ScoreMatrix {
  MetricConfig metric;
  std::vector<std::string> systems;
  std::vector<std::string> topics;
  std::vector<double> values;        // row-major [system][topic]
  std::vector<std::uint8_t> skipped;  // per topic

  double at(std::size_t system, std::size_t topic) const {
    return values[system * topics.size() + topic];
  }
  std::size_t num_active_topics() const;
  bool operator==(const ScoreMatrix&) const = default;
};

struct EvalOptions {
  // Restrict evaluation to these topics; empty means every judged topic.
  std::vector<std::string> topics;
  // Systems to evaluate (indices into campaign.runs()); empty means all.
  std::vector<std::size_t> systems;
  // Replace N_R for the listed topics.
  std::map<std::string, int> frozen_num_relevant;
  int threads = 0;
};

// Evaluates each metric over the campaign using the shared rarity `index`.
// A system without a ranking for a topic scores 0 there. Throws DataError
// when there is no judged topic to evaluate.
std::vector<ScoreMatrix> evaluate_campaign(const Campaign& campaign, const RarityIndex& index,
                                           std::span<const MetricConfig> metrics,
                                           const EvalOptions& options = {});
ScoreMatrix evaluate_campaign(const Campaign& campaign, const RarityIndex& index,
                              const MetricConfig& metric, const EvalOptions& options = {});

namespace reference {
std::vector<ScoreMatrix> evaluate_campaign(const Campaign& campaign, const RarityIndex& index,
                                           std::span<const MetricConfig> metrics,
                                           const EvalOptions& options = {});
}  // namespace reference

// Arithmetic mean over non-skipped topics, one value per matrix row. Throws
// DataError when every topic is skipped.
std::vector<double> mean_scores(const ScoreMatrix& matrix);
std::map<std::string, double> mean_score_map(const ScoreMatrix& matrix);

struct RankedSystem {
  std::string system_id;
  double mean = 0.0;
  double rank = 0.0;  // midrank, 1 is best
};

struct SystemRanking {
  // Descending mean; equal means listed by system id.
  std::vector<RankedSystem> entries;

  std::optional<double> rank_of(const std::string& system_id) const;
};

SystemRanking rank_systems(std::span<const std::string> systems, std::span<const double> means);
SystemRanking rank_systems(const std::map<std::string, double>& means);
SystemRanking rank_systems(const ScoreMatrix& matrix);

}  // namespace rareval
