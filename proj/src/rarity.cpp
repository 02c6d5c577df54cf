#include "rareval/rarity.hpp"

#include <algorithm>
#include <numeric>

#include "rareval/error.hpp"

namespace rareval {

std::string_view to_string(RarityVariant variant) {
  return variant == RarityVariant::kEq2 ? "eq2" : "revised";
}

RarityVariant parse_rarity_variant(std::string_view name) {
  if (name == "eq2") return RarityVariant::kEq2;
  if (name == "revised") return RarityVariant::kRevised;
  throw ConfigError("unknown rarity variant '" + std::string(name) + "' (expected eq2 or revised)");
}

double rarity_value(int count, int total_systems, RarityVariant variant) {
  // (S - S_d) / S rather than 1 - S_d / S: a single rounding keeps the
  // results inside their closed bounds.
  if (variant == RarityVariant::kEq2)
    return static_cast<double>(total_systems - count) / total_systems;
  if (total_systems == 1) return 1.0;
  return static_cast<double>(total_systems - count) / (total_systems - 1);
}

RarityIndex RarityIndex::build(const Campaign& campaign, std::optional<int> count_depth) {
  std::vector<std::size_t> all(campaign.num_systems());
  std::iota(all.begin(), all.end(), std::size_t{0});
  return build(campaign, all, count_depth);
}

RarityIndex RarityIndex::build(const Campaign& campaign, std::span<const std::size_t> systems,
                               std::optional<int> count_depth) {
  if (systems.empty()) throw ConfigError("rarity index needs at least one system");
  if (count_depth && *count_depth < 1) throw ConfigError("rarity count depth must be >= 1");

  const auto& topics = campaign.topics();
  std::vector<std::vector<int>> counts(topics.size());
  for (std::size_t t = 0; t < topics.size(); ++t) {
    auto& c = counts[t];
    c.assign(topics[t].doc_ids.size(), 0);
    for (std::size_t s : systems) {
      const auto& ranking = topics[t].rankings.at(s);
      std::size_t depth = ranking.size();
      if (count_depth) depth = std::min(depth, static_cast<std::size_t>(*count_depth));
      for (std::size_t i = 0; i < depth; ++i) ++c[static_cast<std::size_t>(ranking[i])];
    }
  }
  return RarityIndex(campaign, static_cast<int>(systems.size()), count_depth, std::move(counts));
}

int RarityIndex::count(std::string_view topic, std::string_view doc) const {
  auto t = campaign_.topic_index(topic);
  if (!t) return 0;
  auto d = campaign_.topics()[*t].find(doc);
  if (!d) return 0;
  return count(*t, *d);
}

double rarity(const RarityIndex& index, std::string_view topic, std::string_view doc,
              RarityVariant variant) {
  const int c = index.count(topic, doc);
  if (c == 0)
    throw UndefinedError("rarity undefined: document '" + std::string(doc) + "' of topic '" +
                         std::string(topic) + "' was retrieved by no system");
  return rarity_value(c, index.total_systems(), variant);
}

double rareness(const RarityIndex& index, std::string_view topic, std::string_view doc) {
  return rarity(index, topic, doc, RarityVariant::kEq2);
}

double rareness_revised(const RarityIndex& index, std::string_view topic, std::string_view doc) {
  return rarity(index, topic, doc, RarityVariant::kRevised);
}

std::vector<RarityRow> rarity_report(const Campaign& campaign, const RarityIndex& index,
                                     std::string_view topic, RarityVariant variant) {
  if (!campaign.qrels().has_topic(std::string(topic)))
    throw DataError("topic '" + std::string(topic) + "' is not in the qrels");
  std::vector<RarityRow> rows;
  auto t = campaign.topic_index(topic);
  const auto& table = campaign.topics()[*t];
  for (std::size_t d = 0; d < table.doc_ids.size(); ++d) {
    if (!table.relevant[d]) continue;
    const int c = index.count(table.id, table.doc_ids[d]);
    if (c == 0) continue;
    rows.push_back(RarityRow{table.doc_ids[d], table.grade[d], c,
                             rarity_value(c, index.total_systems(), variant)});
  }
  std::sort(rows.begin(), rows.end(), [](const RarityRow& a, const RarityRow& b) {
    if (a.rarity != b.rarity) return a.rarity > b.rarity;
    return a.doc < b.doc;
  });
  return rows;
}

}  // namespace rareval
