#pragma once

// Meta-evaluation: rank correlation, discriminative power (Tukey HSD),
// topic-subsampling stability and the subset-of-participants experiment.
//
// The trial loops run under OpenMP. Each trial owns a random substream derived
// from (seed, trial), and per-trial results are reduced in trial order, so the
// output does not depend on the thread count. Sequential versions live in
// namespace reference.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rareval/evaluation.hpp"
#include "rareval/random.hpp"

namespace rareval {

// Tie-corrected Kendall tau-b. Throws ConfigError for mismatched or too
// short inputs and UndefinedError when either side is entirely tied.
double kendall_tau_b(std::span<const double> x, std::span<const double> y);
// Over the rank values of two rankings of the same system set.
double kendall_tau(const SystemRanking& a, const SystemRanking& b);

struct DiscriminativePower {
  double level = 0.95;
  int significant_pairs = 0;
  int total_pairs = 0;
  int df = 0;                      // (systems - 1)(topics - 1)
  double residual_mean_square = 0.0;
  double q_critical = 0.0;
  double critical_difference = 0.0;
};

// Tukey HSD over a two-way additive model (systems as treatments, topics as
// blocks) on the matrix's non-skipped topics. `level` is the confidence level,
// e.g. 0.95 or 0.99.
DiscriminativePower discriminative_power(const ScoreMatrix& matrix, double level);

enum class StabilityDirection {
  kWinner,   // fraction of trials won by the pair's more frequent winner
  kFullSet,  // fraction of trials agreeing with the full-topic-set order
};

struct StabilityConfig {
  int sample_size = 1;  // T topics per trial
  int trials = 1000;
  std::uint64_t seed = kDefaultSeed;
  StabilityDirection direction = StabilityDirection::kWinner;
  int threads = 0;
};

struct PairStability {
  std::string system_a;
  std::string system_b;
  int wins_a = 0;
  int wins_b = 0;
  int ties = 0;  // each tie counts half to both sides
  double stability = 0.0;
};

struct StabilityResult {
  std::vector<PairStability> pairs;  // (a, b) in matrix row order, a before b
  double overall = 0.0;
};

StabilityResult stability(const ScoreMatrix& matrix, const StabilityConfig& config);

struct SubsetExperimentConfig {
  int subset_size = 2;  // N
  int trials = 1000;
  std::uint64_t seed = kDefaultSeed;
  std::optional<int> count_depth;  // rarity counting depth
  int max_attempts_per_trial = 1000;
  int threads = 0;
};

struct SubsetExperimentResult {
  int subset_size = 0;
  int trials = 0;
  double mean_tau = 0.0;
  int resamples = 0;  // draws discarded because tau was undefined
};

// Ranks all systems once with rarity over the whole campaign; then, per trial,
// samples N systems, recomputes rarity over just those N, re-ranks them and
// correlates with the full-campaign order restricted to the sample.
SubsetExperimentResult subset_experiment(const Campaign& campaign, const MetricConfig& metric,
                                         const SubsetExperimentConfig& config);

namespace reference {
StabilityResult stability(const ScoreMatrix& matrix, const StabilityConfig& config);
SubsetExperimentResult subset_experiment(const Campaign& campaign, const MetricConfig& metric,
                                         const SubsetExperimentConfig& config);
}  // namespace reference

}  // namespace rareval
