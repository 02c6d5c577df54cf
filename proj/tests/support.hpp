#pragma once

// Campaign builders shared by the unit and acceptance tests.

#include <random>
#include <string>
#include <vector>

#include "oracle/naive_eval.hpp"
#include "rareval/trec_io.hpp"

namespace rareval::testing {

// Scores fall with position, so canonical order is the listed order.
inline Run make_run(const std::string& id,
                    const std::map<std::string, std::vector<std::string>>& ranked) {
  Run run;
  run.system_id = id;
  for (const auto& [topic, docs] : ranked) {
    auto& list = run.rankings[topic];
    for (std::size_t i = 0; i < docs.size(); ++i)
      list.push_back({docs[i], static_cast<double>(docs.size() - i), static_cast<long>(i + 1)});
  }
  return run;
}

inline Campaign to_campaign(const naive::Collection& c) {
  std::vector<Run> runs;
  for (const auto& s : c.systems) runs.push_back(make_run(s.id, s.ranked));
  Qrels qrels(c.threshold);
  for (const auto& [topic, docs] : c.grades)
    for (const auto& [doc, grade] : docs) qrels.add(topic, doc, grade);
  return Campaign(std::move(runs), std::move(qrels));
}

// Four systems on topic t1; d1, d2, d3 relevant.
inline naive::Collection toy4() {
  naive::Collection c;
  c.systems = {{"A", {{"t1", {"d1", "d2", "d4"}}}},
               {"B", {{"t1", {"d1", "d3", "d5"}}}},
               {"C", {{"t1", {"d1", "d2", "d6"}}}},
               {"D", {{"t1", {"d1", "d4", "d5"}}}}};
  c.grades["t1"] = {{"d1", 1}, {"d2", 1}, {"d3", 1}, {"d4", 0}};
  return c;
}

// Random small collection: up to `max_systems` systems, `max_topics` topics,
// documents drawn from a pool of `pool` ids per topic. Some systems skip
// topics; some topics have no relevant documents.
inline naive::Collection random_collection(std::mt19937_64& rng, int max_systems, int max_topics,
                                           int pool, int max_depth) {
  std::uniform_int_distribution<int> n_sys(1, max_systems), n_top(1, max_topics),
      depth(0, max_depth), grade(0, 2);
  std::bernoulli_distribution skip(0.1), judged(0.7);
  naive::Collection c;
  const int S = n_sys(rng), T = n_top(rng);
  std::vector<std::string> ids(pool);
  for (int t = 0; t < T; ++t) {
    const std::string topic = "q" + std::to_string(t);
    for (int d = 0; d < pool; ++d) {
      ids[d] = topic + "-" + std::to_string(d);
      if (judged(rng)) c.grades[topic][ids[d]] = grade(rng);
    }
  }
  for (int s = 0; s < S; ++s) {
    naive::System sys{"s" + std::to_string(s), {}};
    for (int t = 0; t < T; ++t) {
      if (skip(rng)) continue;
      const std::string topic = "q" + std::to_string(t);
      std::vector<std::string> docs;
      for (int d = 0; d < pool; ++d) docs.push_back(topic + "-" + std::to_string(d));
      std::shuffle(docs.begin(), docs.end(), rng);
      docs.resize(std::min<int>(pool, depth(rng)));
      sys.ranked[topic] = docs;
    }
    c.systems.push_back(std::move(sys));
  }
  // Make sure at least one topic is judged.
  if (c.grades.empty()) c.grades["q0"]["q0-0"] = 1;
  return c;
}

}  // namespace rareval::testing
