#include "rareval/evaluation.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>

#include "rareval/error.hpp"
#include "rareval/parallel.hpp"

namespace rareval {
namespace {

struct Plan {
  std::vector<std::size_t> topics;   // indices into campaign.topics()
  std::vector<std::size_t> systems;  // indices into campaign.runs()
  std::vector<int> num_relevant;     // per planned topic
};

Plan make_plan(const Campaign& campaign, const EvalOptions& options) {
  Plan plan;
  const auto& tables = campaign.topics();
  if (options.topics.empty()) {
    for (std::size_t t = 0; t < tables.size(); ++t)
      if (tables[t].judged) plan.topics.push_back(t);
    if (plan.topics.empty()) throw DataError("no judged topics to evaluate");
  } else {
    for (const auto& id : options.topics) {
      auto t = campaign.topic_index(id);
      if (!t) throw DataError("topic '" + id + "' is neither judged nor retrieved");
      plan.topics.push_back(*t);
    }
  }
  for (std::size_t t : plan.topics) {
    auto frozen = options.frozen_num_relevant.find(tables[t].id);
    plan.num_relevant.push_back(frozen != options.frozen_num_relevant.end() ? frozen->second
                                                                           : tables[t].num_relevant);
  }
  if (options.systems.empty()) {
    plan.systems.resize(campaign.num_systems());
    std::iota(plan.systems.begin(), plan.systems.end(), std::size_t{0});
  } else {
    for (std::size_t s : options.systems)
      if (s >= campaign.num_systems()) throw ConfigError("system index out of range");
    plan.systems = options.systems;
  }
  return plan;
}

ScoreMatrix empty_matrix(const Campaign& campaign, const Plan& plan, const MetricConfig& metric) {
  ScoreMatrix m;
  m.metric = metric;
  for (std::size_t s : plan.systems) m.systems.push_back(campaign.system_ids()[s]);
  for (std::size_t t : plan.topics) m.topics.push_back(campaign.topics()[t].id);
  m.values.assign(m.systems.size() * m.topics.size(), 0.0);
  m.skipped.assign(m.topics.size(), 0);
  for (std::size_t t = 0; t < plan.topics.size(); ++t)
    m.skipped[t] = metric.skips_empty_topics() && plan.num_relevant[t] <= 0;
  return m;
}

// One (system, topic) cell. `buffer` is scratch space reused across cells.
double score_cell(const TopicTable& table, std::size_t topic_index, std::size_t system,
                  int num_relevant, const MetricConfig& metric, const RarityIndex& index,
                  std::vector<JudgedDoc>& buffer) {
  const auto& ranking = table.rankings[system];
  const std::size_t depth = judged_depth(metric, ranking.size());
  buffer.assign(depth, JudgedDoc{});
  for (std::size_t i = 0; i < depth; ++i) {
    const int doc = ranking[i];
    if (!table.relevant[static_cast<std::size_t>(doc)]) continue;
    buffer[i].relevant = true;
    if (!metric.uses_rarity()) continue;
    const int c = effective_count(index.count(topic_index, doc), i, index.count_depth());
    if (c == 0)
      throw UndefinedError("system '" + std::to_string(system) +
                           "' is not part of the rarity index for topic '" + table.id + "'");
    buffer[i].rarity = rarity_value(c, index.total_systems(), metric.rarity);
  }
  return score_topic(metric, buffer, num_relevant).value_or(0.0);
}

void validate_all(std::span<const MetricConfig> metrics) {
  for (const auto& m : metrics) m.validate();
}

}  // namespace

std::size_t ScoreMatrix::num_active_topics() const {
  return static_cast<std::size_t>(std::count(skipped.begin(), skipped.end(), 0));
}

std::vector<ScoreMatrix> evaluate_campaign(const Campaign& campaign, const RarityIndex& index,
                                           std::span<const MetricConfig> metrics,
                                           const EvalOptions& options) {
  validate_all(metrics);
  const Plan plan = make_plan(campaign, options);
  std::vector<ScoreMatrix> out;
  out.reserve(metrics.size());
  for (const auto& m : metrics) out.push_back(empty_matrix(campaign, plan, m));

  const std::size_t n_sys = plan.systems.size();
  const std::size_t n_top = plan.topics.size();
  const std::size_t cells = metrics.size() * n_sys * n_top;
  const auto& tables = campaign.topics();
  std::exception_ptr failure;
  const int threads = resolve_threads(options.threads);

#pragma omp parallel num_threads(threads)
  {
    std::vector<JudgedDoc> buffer;
#pragma omp for schedule(dynamic, 64)
    for (std::size_t c = 0; c < cells; ++c) {
      const std::size_t m = c / (n_sys * n_top);
      const std::size_t s = (c / n_top) % n_sys;
      const std::size_t t = c % n_top;
      if (out[m].skipped[t]) continue;
      try {
        const std::size_t topic = plan.topics[t];
        out[m].values[s * n_top + t] = score_cell(tables[topic], topic, plan.systems[s],
                                                  plan.num_relevant[t], metrics[m], index, buffer);
      } catch (...) {
#pragma omp critical(rareval_eval_failure)
        if (!failure) failure = std::current_exception();
      }
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

ScoreMatrix evaluate_campaign(const Campaign& campaign, const RarityIndex& index,
                              const MetricConfig& metric, const EvalOptions& options) {
  return std::move(evaluate_campaign(campaign, index, std::span(&metric, 1), options).front());
}

namespace reference {

std::vector<ScoreMatrix> evaluate_campaign(const Campaign& campaign, const RarityIndex& index,
                                           std::span<const MetricConfig> metrics,
                                           const EvalOptions& options) {
  validate_all(metrics);
  const Plan plan = make_plan(campaign, options);
  std::vector<ScoreMatrix> out;
  std::vector<JudgedDoc> buffer;
  for (const auto& metric : metrics) {
    ScoreMatrix m = empty_matrix(campaign, plan, metric);
    for (std::size_t s = 0; s < plan.systems.size(); ++s)
      for (std::size_t t = 0; t < plan.topics.size(); ++t) {
        if (m.skipped[t]) continue;
        const std::size_t topic = plan.topics[t];
        m.values[s * plan.topics.size() + t] =
            score_cell(campaign.topics()[topic], topic, plan.systems[s], plan.num_relevant[t],
                       metric, index, buffer);
      }
    out.push_back(std::move(m));
  }
  return out;
}

}  // namespace reference

std::vector<double> mean_scores(const ScoreMatrix& matrix) {
  const std::size_t active = matrix.num_active_topics();
  if (active == 0) throw DataError("every topic is skipped for " + matrix.metric.name());
  std::vector<double> means(matrix.systems.size(), 0.0);
  for (std::size_t s = 0; s < matrix.systems.size(); ++s) {
    double sum = 0.0;
    for (std::size_t t = 0; t < matrix.topics.size(); ++t)
      if (!matrix.skipped[t]) sum += matrix.at(s, t);
    means[s] = sum / static_cast<double>(active);
  }
  return means;
}

std::map<std::string, double> mean_score_map(const ScoreMatrix& matrix) {
  const auto means = mean_scores(matrix);
  std::map<std::string, double> out;
  for (std::size_t s = 0; s < means.size(); ++s) out.emplace(matrix.systems[s], means[s]);
  return out;
}

std::optional<double> SystemRanking::rank_of(const std::string& system_id) const {
  for (const auto& e : entries)
    if (e.system_id == system_id) return e.rank;
  return std::nullopt;
}

SystemRanking rank_systems(std::span<const std::string> systems, std::span<const double> means) {
  if (systems.size() != means.size()) throw ConfigError("systems and means differ in length");
  if (systems.empty()) throw ConfigError("cannot rank an empty set of systems");
  std::vector<std::size_t> order(systems.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (means[a] != means[b]) return means[a] > means[b];
    return systems[a] < systems[b];
  });
  SystemRanking ranking;
  ranking.entries.resize(order.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && means[order[j + 1]] == means[order[i]]) ++j;
    const double midrank = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t p = i; p <= j; ++p)
      ranking.entries[p] = RankedSystem{systems[order[p]], means[order[p]], midrank};
    i = j + 1;
  }
  return ranking;
}

SystemRanking rank_systems(const std::map<std::string, double>& means) {
  std::vector<std::string> ids;
  std::vector<double> values;
  for (const auto& [id, v] : means) {
    ids.push_back(id);
    values.push_back(v);
  }
  return rank_systems(ids, values);
}

SystemRanking rank_systems(const ScoreMatrix& matrix) {
  const auto means = mean_scores(matrix);
  return rank_systems(matrix.systems, means);
}

}  // namespace rareval
