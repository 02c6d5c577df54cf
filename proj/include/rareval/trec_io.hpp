#pragma once

// TREC run / qrels parsing and the immutable in-memory campaign.
//
// Run lines:   topic Q0 docid rank score runtag
// Qrels lines: topic 0 docid grade
//
// Ids are compared bytewise. Within a topic a run is kept in canonical
// evaluation order: descending score, ties broken by descending doc id (the
// trec_eval convention), or by ascending rank field when OrderPolicy::kRankField
// is requested.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace rareval {

struct RankedDoc {
  std::string doc;
  double score = 0.0;
  long rank = 0;  // the file's rank column, kept verbatim

  bool operator==(const RankedDoc&) const = default;
};

enum class DedupPolicy { kReject, kFirst };
enum class OrderPolicy { kScore, kRankField };

struct RunParseOptions {
  DedupPolicy dedup = DedupPolicy::kReject;
  OrderPolicy order = OrderPolicy::kScore;
};

struct Run {
  std::string system_id;
  std::map<std::string, std::vector<RankedDoc>> rankings;

  // Empty list when the run has no entry for `topic`.
  const std::vector<RankedDoc>& ranking(const std::string& topic) const;

  bool operator==(const Run&) const = default;
};

// Sorts `docs` into canonical evaluation order.
void canonicalize(std::vector<RankedDoc>& docs, OrderPolicy order = OrderPolicy::kScore);

// `source` only labels error messages.
Run parse_run(std::istream& in, const RunParseOptions& options = {},
              std::string_view source = "<run>");
// "-" reads standard input.
Run parse_run_file(const std::string& path, const RunParseOptions& options = {});

// Writes `run` in canonical order with full-precision scores, so that
// parse_run(write_run(r)) == r.
void write_run(std::ostream& out, const Run& run);

class Qrels {
 public:
  using TopicJudgments = std::map<std::string, int>;

  explicit Qrels(int relevance_threshold = 1);

  // Repeating an identical (topic, doc, grade) is accepted; a conflicting
  // grade or a negative grade throws DataError.
  void add(const std::string& topic, const std::string& doc, int grade);

  int threshold() const { return threshold_; }
  Qrels with_threshold(int relevance_threshold) const;

  bool has_topic(const std::string& topic) const;
  std::optional<int> grade(const std::string& topic, const std::string& doc) const;
  bool is_relevant(const std::string& topic, const std::string& doc) const;
  // Sorted ascending.
  std::vector<std::string> relevant(const std::string& topic) const;
  int num_relevant(const std::string& topic) const;
  std::vector<std::string> topics() const;

  const std::map<std::string, TopicJudgments>& judgments() const { return judgments_; }

  bool operator==(const Qrels&) const = default;

 private:
  int threshold_;
  std::map<std::string, TopicJudgments> judgments_;
};

Qrels parse_qrels(std::istream& in, int relevance_threshold = 1,
                  std::string_view source = "<qrels>");
Qrels parse_qrels_file(const std::string& path, int relevance_threshold = 1);
void write_qrels(std::ostream& out, const Qrels& qrels);

// Dense per-topic view of a campaign used by the evaluation kernels: every
// document retrieved by any run is interned to a small integer.
struct TopicTable {
  std::string id;
  bool judged = false;    // topic present in qrels
  int num_relevant = 0;   // N_R from qrels, retrieved or not
  std::vector<std::string> doc_ids;
  std::unordered_map<std::string, int> doc_index;
  std::vector<std::uint8_t> relevant;  // indexed by doc id
  std::vector<int> grade;              // -1 for unjudged documents
  std::vector<std::vector<int>> rankings;  // [system] -> doc ids, canonical order

  std::optional<int> find(std::string_view doc) const;
};

// A set of runs with pairwise-distinct system ids plus the shared qrels.
// Immutable; copies share storage.
class Campaign {
 public:
  // Throws DataError on an empty run set or duplicate system ids.
  Campaign(std::vector<Run> runs, Qrels qrels);

  const std::vector<Run>& runs() const;
  const Qrels& qrels() const;
  std::size_t num_systems() const;
  const std::vector<std::string>& system_ids() const;
  std::optional<std::size_t> system_index(std::string_view id) const;

  // Union of qrels topics and run topics, sorted.
  const std::vector<TopicTable>& topics() const;
  std::optional<std::size_t> topic_index(std::string_view topic) const;
  const TopicTable& topic(std::string_view topic) const;

  // Topics some run answers but qrels does not judge.
  std::vector<std::string> unjudged_topics() const;

 private:
  struct Data;
  std::shared_ptr<const Data> data_;
};

struct TopicCoverage {
  std::string system_id;
  std::size_t topics_answered = 0;
  std::size_t judged_topics_missing = 0;
  std::vector<std::string> unjudged_topics;
};

std::vector<TopicCoverage> topic_coverage(const Campaign& campaign);

struct LoadOptions {
  RunParseOptions run;
  int relevance_threshold = 1;
  int threads = 0;  // 0: runtime default
};

// Each run source is a file, a directory (every regular file in it, sorted by
// name) or "-" for standard input. Files are parsed concurrently.
Campaign load_campaign(const std::vector<std::string>& run_sources,
                       const std::string& qrels_source, const LoadOptions& options = {});

}  // namespace rareval
