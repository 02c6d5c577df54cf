#pragma once

// Synthetic campaigns and the hypothetical systems used to probe how rarity
// weighting moves a system through the ranking.
//
// S_rare retrieves D relevant documents nobody else retrieved (fresh ids added
// to the qrels). S_common retrieves the D most widely retrieved relevant
// documents of the topic. Both join the campaign, so S grows by one.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rareval/evaluation.hpp"
#include "rareval/random.hpp"
#include "rareval/trec_io.hpp"

namespace rareval {

struct SynthSpec {
  int n_systems = 20;
  int n_topics = 10;
  int n_relevant_per_topic = 60;
  int doc_pool_size = 2000;
  // 0: systems draw their relevant documents independently; 1: every system
  // retrieves the same relevant documents.
  double overlap_bias = 0.5;
  int run_depth = 100;
  std::uint64_t seed = kDefaultSeed;

  // Throws ConfigError when the spec is infeasible.
  void validate() const;
};

// Deterministic in spec.seed.
Campaign generate_campaign(const SynthSpec& spec);

enum class PadPolicy { kNone, kPoolNonRelevant };

struct HypotheticalOptions {
  PadPolicy pad = PadPolicy::kPoolNonRelevant;
  // Runs are padded to max(D, pad_depth) entries.
  int pad_depth = 100;
};

inline constexpr const char* kRareSystemId = "S_rare";
inline constexpr const char* kCommonSystemId = "S_common";
inline constexpr const char* kRareDocPrefix = "synthetic-rare:";

// Run for `topic` retrieving D fresh relevant documents, and the qrels
// extended with them. Throws ConfigError for D < 1.
std::pair<Run, Qrels> make_s_rare(const Campaign& campaign, const std::string& topic, int D,
                                  const HypotheticalOptions& options = {});

// Run for `topic` listing its retrieved relevant documents by descending
// retrieval count (ties by ascending doc id), truncated at D. Counts use the
// full depth of every run. Throws ConfigError when D exceeds the number
// available.
Run make_s_common(const Campaign& campaign, const std::string& topic, int D,
                  const HypotheticalOptions& options = {});

// Number of distinct relevant documents retrieved for `topic`.
int available_common_documents(const Campaign& campaign, const std::string& topic);

enum class HypotheticalKind { kRare, kCommon };

struct TrajectoryPoint {
  int D = 0;
  double rank = 0.0;  // midrank of the hypothetical system
  double score = 0.0;
};

struct TrajectoryResult {
  double alpha = 0.0;
  std::vector<TrajectoryPoint> points;  // D = 1 .. D_max
  std::optional<int> first_rank_one;    // least D with rank 1
};

struct TrajectoryOptions {
  // Topics the hypothetical system answers; ranks use the mean over them.
  std::vector<std::string> topics;
  int D_max = 45;
  std::optional<int> count_depth;
  // Keep the original N_R when S_rare's documents join the qrels.
  bool freeze_num_relevant = false;
  HypotheticalOptions hypothetical;
  int threads = 0;
};

// For each alpha and each D in 1..D_max, inserts the hypothetical system into
// the campaign and reports its midrank under `metric` with that alpha. The
// metric must use a rarity formulation (additive or mixture).
std::vector<TrajectoryResult> rank_trajectory(const Campaign& campaign, HypotheticalKind kind,
                                              const std::vector<double>& alphas,
                                              const MetricConfig& metric,
                                              const TrajectoryOptions& options);

}  // namespace rareval
