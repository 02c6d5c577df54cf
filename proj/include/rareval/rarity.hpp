#pragma once

// Cross-system retrieval counts and document rarity.
//
// For a campaign of S systems, S_d is the number of systems whose ranking for
// the topic contains d (within count_depth, when one is set). Two rarity
// functions are offered:
//   eq2:      R(d)  = 1 - S_d / S               in [0, (S-1)/S]
//   revised:  R'(d) = 1 - (S_d - 1) / (S - 1)   in [0, 1]   (1 when S == 1)

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rareval/trec_io.hpp"

namespace rareval {

enum class RarityVariant { kEq2, kRevised };

std::string_view to_string(RarityVariant variant);
// Accepts "eq2" or "revised"; throws ConfigError otherwise.
RarityVariant parse_rarity_variant(std::string_view name);

// Rarity of a document retrieved by `count` of `total_systems` systems.
// Requires 1 <= count <= total_systems.
double rarity_value(int count, int total_systems, RarityVariant variant);

class RarityIndex {
 public:
  // Counts over every system of the campaign. `count_depth` limits how deep
  // into each ranking a retrieval counts; nullopt means the full run.
  static RarityIndex build(const Campaign& campaign,
                           std::optional<int> count_depth = std::nullopt);

  // Counts over a subset of systems (indices into campaign.runs()); S becomes
  // the subset size.
  static RarityIndex build(const Campaign& campaign, std::span<const std::size_t> systems,
                           std::optional<int> count_depth = std::nullopt);

  int total_systems() const { return total_systems_; }
  std::optional<int> count_depth() const { return count_depth_; }
  // S == 1: rarity carries no information.
  bool degenerate() const { return total_systems_ == 1; }

  // 0 when no system retrieved the document within count_depth.
  int count(std::size_t topic_index, int doc_index) const {
    return counts_[topic_index][static_cast<std::size_t>(doc_index)];
  }
  int count(std::string_view topic, std::string_view doc) const;

  const Campaign& campaign() const { return campaign_; }

 private:
  RarityIndex(Campaign campaign, int total, std::optional<int> depth,
              std::vector<std::vector<int>> counts)
      : campaign_(std::move(campaign)),
        total_systems_(total),
        count_depth_(depth),
        counts_(std::move(counts)) {}

  Campaign campaign_;
  int total_systems_;
  std::optional<int> count_depth_;
  std::vector<std::vector<int>> counts_;  // [topic][doc]
};

// Throw UndefinedError when the document was retrieved by no system.
double rareness(const RarityIndex& index, std::string_view topic, std::string_view doc);
double rareness_revised(const RarityIndex& index, std::string_view topic, std::string_view doc);
double rarity(const RarityIndex& index, std::string_view topic, std::string_view doc,
              RarityVariant variant);

struct RarityRow {
  std::string doc;
  int grade = 0;
  int count = 0;  // S_d
  double rarity = 0.0;
};

// Judged-relevant documents of `topic` that some system retrieved, by
// descending rarity, ties by ascending doc id. Throws DataError when the topic
// is not in the qrels.
std::vector<RarityRow> rarity_report(const Campaign& campaign, const RarityIndex& index,
                                     std::string_view topic, RarityVariant variant);

}  // namespace rareval
