#include "rareval/trec_io.hpp"

#include <omp.h>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <unordered_set>

#include "rareval/error.hpp"
#include "rareval/parallel.hpp"

namespace rareval {
namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i == line.size()) break;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    fields.push_back(line.substr(i, j - i));
    i = j;
  }
  return fields;
}

template <typename T>
std::optional<T> parse_number(std::string_view text) {
  T value{};
  const char* begin = text.data();
  const char* end = begin + text.size();
  if (begin != end && *begin == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return value;
}

bool canonical_less(const RankedDoc& a, const RankedDoc& b) {
  if (a.score != b.score) return a.score > b.score;
  return a.doc > b.doc;
}

bool rank_field_less(const RankedDoc& a, const RankedDoc& b) {
  if (a.rank != b.rank) return a.rank < b.rank;
  return a.doc > b.doc;
}

std::string format_score(double score) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", score);
  return buf;
}

template <typename Fn>
auto with_source(const std::string& path, Fn&& fn) {
  if (path == "-") return fn(std::cin, std::string_view("<stdin>"));
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(path + ": cannot open file");
  return fn(in, std::string_view(path));
}

}  // namespace

const std::vector<RankedDoc>& Run::ranking(const std::string& topic) const {
  static const std::vector<RankedDoc> kEmpty;
  auto it = rankings.find(topic);
  return it == rankings.end() ? kEmpty : it->second;
}

void canonicalize(std::vector<RankedDoc>& docs, OrderPolicy order) {
  if (order == OrderPolicy::kScore)
    std::sort(docs.begin(), docs.end(), canonical_less);
  else
    std::sort(docs.begin(), docs.end(), rank_field_less);
}

Run parse_run(std::istream& in, const RunParseOptions& options, std::string_view source) {
  Run run;
  std::map<std::string, std::unordered_set<std::string>> seen;
  std::string line;
  std::size_t line_no = 0;
  bool have_tag = false;
  const std::string src(source);

  while (std::getline(in, line)) {
    ++line_no;
    auto fields = split_fields(line);
    if (fields.empty()) continue;
    if (fields.size() != 6)
      throw ParseError(src, line_no,
                       "expected 6 fields (topic Q0 docid rank score runtag), got " +
                           std::to_string(fields.size()));
    auto rank = parse_number<long>(fields[3]);
    if (!rank) throw ParseError(src, line_no, "rank is not an integer: '" + std::string(fields[3]) + "'");
    auto score = parse_number<double>(fields[4]);
    if (!score || !std::isfinite(*score))
      throw ParseError(src, line_no, "score is not a finite number: '" + std::string(fields[4]) + "'");

    if (!have_tag) {
      run.system_id = std::string(fields[5]);
      have_tag = true;
    } else if (fields[5] != run.system_id) {
      throw ParseError(src, line_no,
                       "mixed run tags in one file: '" + run.system_id + "' and '" +
                           std::string(fields[5]) + "'");
    }

    std::string topic(fields[0]);
    std::string doc(fields[2]);
    if (!seen[topic].insert(doc).second) {
      if (options.dedup == DedupPolicy::kReject)
        throw ParseError(src, line_no, "duplicate document '" + doc + "' for topic '" + topic + "'");
      continue;
    }
    run.rankings[topic].push_back(RankedDoc{std::move(doc), *score, *rank});
  }
  if (!have_tag) throw DataError(src + ": run contains no entries");

  for (auto& [topic, docs] : run.rankings) canonicalize(docs, options.order);
  return run;
}

Run parse_run_file(const std::string& path, const RunParseOptions& options) {
  return with_source(path, [&](std::istream& in, std::string_view src) {
    return parse_run(in, options, src);
  });
}

void write_run(std::ostream& out, const Run& run) {
  for (const auto& [topic, docs] : run.rankings) {
    for (const auto& d : docs) {
      out << topic << " Q0 " << d.doc << ' ' << d.rank << ' ' << format_score(d.score) << ' '
          << run.system_id << '\n';
    }
  }
}

Qrels::Qrels(int relevance_threshold) : threshold_(relevance_threshold) {
  if (relevance_threshold < 1) throw ConfigError("relevance threshold must be >= 1");
}

void Qrels::add(const std::string& topic, const std::string& doc, int grade) {
  if (grade < 0)
    throw DataError("negative grade " + std::to_string(grade) + " for " + topic + "/" + doc);
  auto [it, inserted] = judgments_[topic].emplace(doc, grade);
  if (!inserted && it->second != grade)
    throw DataError("conflicting grades for topic '" + topic + "' doc '" + doc + "': " +
                    std::to_string(it->second) + " vs " + std::to_string(grade));
}

Qrels Qrels::with_threshold(int relevance_threshold) const {
  Qrels copy(relevance_threshold);
  copy.judgments_ = judgments_;
  return copy;
}

bool Qrels::has_topic(const std::string& topic) const { return judgments_.count(topic) != 0; }

std::optional<int> Qrels::grade(const std::string& topic, const std::string& doc) const {
  auto t = judgments_.find(topic);
  if (t == judgments_.end()) return std::nullopt;
  auto d = t->second.find(doc);
  if (d == t->second.end()) return std::nullopt;
  return d->second;
}

bool Qrels::is_relevant(const std::string& topic, const std::string& doc) const {
  auto g = grade(topic, doc);
  return g && *g >= threshold_;
}

std::vector<std::string> Qrels::relevant(const std::string& topic) const {
  std::vector<std::string> out;
  auto t = judgments_.find(topic);
  if (t == judgments_.end()) return out;
  for (const auto& [doc, g] : t->second)
    if (g >= threshold_) out.push_back(doc);
  return out;
}

int Qrels::num_relevant(const std::string& topic) const {
  auto t = judgments_.find(topic);
  if (t == judgments_.end()) return 0;
  return static_cast<int>(std::count_if(t->second.begin(), t->second.end(),
                                        [&](const auto& kv) { return kv.second >= threshold_; }));
}

std::vector<std::string> Qrels::topics() const {
  std::vector<std::string> out;
  out.reserve(judgments_.size());
  for (const auto& [topic, _] : judgments_) out.push_back(topic);
  return out;
}

Qrels parse_qrels(std::istream& in, int relevance_threshold, std::string_view source) {
  Qrels qrels(relevance_threshold);
  std::string line;
  std::size_t line_no = 0;
  const std::string src(source);
  while (std::getline(in, line)) {
    ++line_no;
    auto fields = split_fields(line);
    if (fields.empty()) continue;
    if (fields.size() != 4)
      throw ParseError(src, line_no,
                       "expected 4 fields (topic 0 docid grade), got " + std::to_string(fields.size()));
    auto grade = parse_number<int>(fields[3]);
    if (!grade) throw ParseError(src, line_no, "grade is not an integer: '" + std::string(fields[3]) + "'");
    try {
      qrels.add(std::string(fields[0]), std::string(fields[2]), *grade);
    } catch (const DataError& e) {
      throw ParseError(src, line_no, e.what());
    }
  }
  return qrels;
}

Qrels parse_qrels_file(const std::string& path, int relevance_threshold) {
  return with_source(path, [&](std::istream& in, std::string_view src) {
    return parse_qrels(in, relevance_threshold, src);
  });
}

void write_qrels(std::ostream& out, const Qrels& qrels) {
  for (const auto& [topic, docs] : qrels.judgments())
    for (const auto& [doc, g] : docs) out << topic << " 0 " << doc << ' ' << g << '\n';
}

std::optional<int> TopicTable::find(std::string_view doc) const {
  auto it = doc_index.find(std::string(doc));
  if (it == doc_index.end()) return std::nullopt;
  return it->second;
}

struct Campaign::Data {
  std::vector<Run> runs;
  Qrels qrels;
  std::vector<std::string> system_ids;
  std::vector<TopicTable> topics;
  std::map<std::string, std::size_t, std::less<>> topic_lookup;
  std::map<std::string, std::size_t, std::less<>> system_lookup;
};

Campaign::Campaign(std::vector<Run> runs, Qrels qrels) {
  if (runs.empty()) throw DataError("campaign needs at least one run");
  auto data = std::make_shared<Data>(Data{std::move(runs), std::move(qrels), {}, {}, {}, {}});

  for (std::size_t s = 0; s < data->runs.size(); ++s) {
    const auto& id = data->runs[s].system_id;
    if (!data->system_lookup.emplace(id, s).second)
      throw DataError("duplicate system id '" + id + "'");
    data->system_ids.push_back(id);
  }

  std::set<std::string> universe;
  for (const auto& [topic, _] : data->qrels.judgments()) universe.insert(topic);
  for (const auto& run : data->runs)
    for (const auto& [topic, _] : run.rankings) universe.insert(topic);

  const std::size_t n_sys = data->runs.size();
  data->topics.reserve(universe.size());
  for (const auto& topic : universe) {
    TopicTable t;
    t.id = topic;
    t.judged = data->qrels.has_topic(topic);
    t.num_relevant = data->qrels.num_relevant(topic);
    t.rankings.resize(n_sys);
    const Qrels::TopicJudgments* judged = nullptr;
    if (t.judged) judged = &data->qrels.judgments().at(topic);

    for (std::size_t s = 0; s < n_sys; ++s) {
      const auto& ranking = data->runs[s].ranking(topic);
      auto& ids = t.rankings[s];
      ids.reserve(ranking.size());
      for (const auto& entry : ranking) {
        auto [it, inserted] = t.doc_index.emplace(entry.doc, static_cast<int>(t.doc_ids.size()));
        if (inserted) {
          t.doc_ids.push_back(entry.doc);
          int g = -1;
          if (judged) {
            auto j = judged->find(entry.doc);
            if (j != judged->end()) g = j->second;
          }
          t.grade.push_back(g);
          t.relevant.push_back(g >= data->qrels.threshold() ? 1 : 0);
        }
        ids.push_back(it->second);
      }
    }
    data->topic_lookup.emplace(topic, data->topics.size());
    data->topics.push_back(std::move(t));
  }
  data_ = std::move(data);
}

const std::vector<Run>& Campaign::runs() const { return data_->runs; }
const Qrels& Campaign::qrels() const { return data_->qrels; }
std::size_t Campaign::num_systems() const { return data_->runs.size(); }
const std::vector<std::string>& Campaign::system_ids() const { return data_->system_ids; }
const std::vector<TopicTable>& Campaign::topics() const { return data_->topics; }

std::optional<std::size_t> Campaign::system_index(std::string_view id) const {
  auto it = data_->system_lookup.find(id);
  if (it == data_->system_lookup.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> Campaign::topic_index(std::string_view topic) const {
  auto it = data_->topic_lookup.find(topic);
  if (it == data_->topic_lookup.end()) return std::nullopt;
  return it->second;
}

const TopicTable& Campaign::topic(std::string_view topic) const {
  auto idx = topic_index(topic);
  if (!idx) throw DataError("unknown topic '" + std::string(topic) + "'");
  return data_->topics[*idx];
}

std::vector<std::string> Campaign::unjudged_topics() const {
  std::vector<std::string> out;
  for (const auto& t : data_->topics)
    if (!t.judged) out.push_back(t.id);
  return out;
}

std::vector<TopicCoverage> topic_coverage(const Campaign& campaign) {
  std::vector<TopicCoverage> out;
  const auto& qrels = campaign.qrels();
  for (const auto& run : campaign.runs()) {
    TopicCoverage c;
    c.system_id = run.system_id;
    c.topics_answered = run.rankings.size();
    for (const auto& [topic, _] : run.rankings)
      if (!qrels.has_topic(topic)) c.unjudged_topics.push_back(topic);
    for (const auto& [topic, _] : qrels.judgments())
      if (!run.rankings.count(topic)) ++c.judged_topics_missing;
    out.push_back(std::move(c));
  }
  return out;
}

Campaign load_campaign(const std::vector<std::string>& run_sources,
                       const std::string& qrels_source, const LoadOptions& options) {
  namespace fs = std::filesystem;
  std::vector<std::string> files;
  for (const auto& source : run_sources) {
    if (source != "-" && fs::is_directory(source)) {
      std::vector<std::string> in_dir;
      for (const auto& entry : fs::directory_iterator(source))
        if (entry.is_regular_file()) in_dir.push_back(entry.path().string());
      std::sort(in_dir.begin(), in_dir.end());
      files.insert(files.end(), in_dir.begin(), in_dir.end());
    } else {
      files.push_back(source);
    }
  }
  if (files.empty()) throw DataError("no run files given");
  const auto stdin_uses = std::count(files.begin(), files.end(), "-") + (qrels_source == "-" ? 1 : 0);
  if (stdin_uses > 1) throw DataError("standard input ('-') can be used for only one input");

  Qrels qrels = parse_qrels_file(qrels_source, options.relevance_threshold);

  std::vector<Run> runs(files.size());
  std::vector<std::exception_ptr> failures(files.size());
  const int threads = resolve_threads(options.threads);
#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (std::size_t i = 0; i < files.size(); ++i) {
    try {
      runs[i] = parse_run_file(files[i], options.run);
    } catch (...) {
      failures[i] = std::current_exception();
    }
  }
  for (const auto& failure : failures)
    if (failure) std::rethrow_exception(failure);

  std::map<std::string, std::string> origin;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    auto [it, inserted] = origin.emplace(runs[i].system_id, files[i]);
    if (!inserted)
      throw DataError("duplicate system id '" + runs[i].system_id + "' in " + it->second + " and " +
                      files[i]);
  }
  return Campaign(std::move(runs), std::move(qrels));
}

}  // namespace rareval
