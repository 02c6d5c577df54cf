#include "rareval/stats.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <exception>
#include <map>

#include "rareval/error.hpp"
#include "rareval/parallel.hpp"
#include "rareval/studentized_range.hpp"

namespace rareval {
namespace {

constexpr double kZeroResidual = 1e-12;

int sign(double v) { return (v > 0.0) - (v < 0.0); }

std::vector<std::size_t> active_topics(const ScoreMatrix& m) {
  std::vector<std::size_t> out;
  for (std::size_t t = 0; t < m.topics.size(); ++t)
    if (!m.skipped[t]) out.push_back(t);
  return out;
}

struct PairCounts {
  int wins_a = 0;
  int wins_b = 0;
  int ties = 0;
};

StabilityResult run_stability(const ScoreMatrix& m, const StabilityConfig& config, bool parallel) {
  const auto topics = active_topics(m);
  const std::size_t n_sys = m.systems.size();
  if (n_sys < 2) throw ConfigError("stability needs at least 2 systems");
  if (config.trials < 1) throw ConfigError("stability needs at least 1 trial");
  if (config.sample_size < 1 || static_cast<std::size_t>(config.sample_size) > topics.size())
    throw ConfigError("stability sample size T=" + std::to_string(config.sample_size) +
                      " must lie in [1, " + std::to_string(topics.size()) + "]");

  const std::size_t n_pairs = n_sys * (n_sys - 1) / 2;
  const std::size_t T = static_cast<std::size_t>(config.sample_size);
  std::vector<PairCounts> totals(n_pairs);

  auto run_trials = [&](std::vector<PairCounts>& counts, auto&& for_each_trial) {
    std::vector<double> means(n_sys);
    for_each_trial([&](int trial) {
      Rng rng = substream(config.seed, static_cast<std::uint64_t>(trial));
      const auto sample = sample_without_replacement(rng, topics.size(), T);
      for (std::size_t s = 0; s < n_sys; ++s) {
        double sum = 0.0;
        for (std::size_t idx : sample) sum += m.at(s, topics[idx]);
        means[s] = sum / static_cast<double>(T);
      }
      std::size_t p = 0;
      for (std::size_t a = 0; a < n_sys; ++a)
        for (std::size_t b = a + 1; b < n_sys; ++b, ++p) {
          if (means[a] > means[b])
            ++counts[p].wins_a;
          else if (means[b] > means[a])
            ++counts[p].wins_b;
          else
            ++counts[p].ties;
        }
    });
  };

  if (parallel) {
    const int threads = resolve_threads(config.threads);
#pragma omp parallel num_threads(threads)
    {
      std::vector<PairCounts> local(n_pairs);
      run_trials(local, [&](auto&& body) {
#pragma omp for schedule(static)
        for (int trial = 0; trial < config.trials; ++trial) body(trial);
      });
#pragma omp critical(rareval_stability_merge)
      for (std::size_t p = 0; p < n_pairs; ++p) {
        totals[p].wins_a += local[p].wins_a;
        totals[p].wins_b += local[p].wins_b;
        totals[p].ties += local[p].ties;
      }
    }
  } else {
    run_trials(totals, [&](auto&& body) {
      for (int trial = 0; trial < config.trials; ++trial) body(trial);
    });
  }

  std::vector<double> full_means;
  if (config.direction == StabilityDirection::kFullSet) full_means = mean_scores(m);

  StabilityResult result;
  result.pairs.reserve(n_pairs);
  const double trials = config.trials;
  double sum = 0.0;
  std::size_t p = 0;
  for (std::size_t a = 0; a < n_sys; ++a)
    for (std::size_t b = a + 1; b < n_sys; ++b, ++p) {
      const auto& c = totals[p];
      int favoured = std::max(c.wins_a, c.wins_b);
      if (config.direction == StabilityDirection::kFullSet) {
        if (full_means[a] > full_means[b]) favoured = c.wins_a;
        if (full_means[b] > full_means[a]) favoured = c.wins_b;
      }
      const double value = (favoured + 0.5 * c.ties) / trials;
      result.pairs.push_back(PairStability{m.systems[a], m.systems[b], c.wins_a, c.wins_b, c.ties, value});
      sum += value;
    }
  result.overall = sum / static_cast<double>(n_pairs);
  return result;
}

struct TrialOutcome {
  double tau = 0.0;
  int resamples = 0;
};

TrialOutcome subset_trial(const Campaign& campaign, const MetricConfig& metric,
                          const SubsetExperimentConfig& config, const std::vector<double>& full_means,
                          int trial) {
  const std::size_t n = static_cast<std::size_t>(config.subset_size);
  for (int attempt = 0; attempt < config.max_attempts_per_trial; ++attempt) {
    Rng rng = substream(config.seed, static_cast<std::uint64_t>(trial),
                        static_cast<std::uint64_t>(attempt));
    auto sample = sample_without_replacement(rng, campaign.num_systems(), n);
    std::sort(sample.begin(), sample.end());

    const auto index = RarityIndex::build(campaign, sample, config.count_depth);
    EvalOptions options;
    options.systems = sample;
    options.threads = 1;
    const auto sub_means = mean_scores(evaluate_campaign(campaign, index, metric, options));

    std::vector<double> reference(n);
    for (std::size_t i = 0; i < n; ++i) reference[i] = full_means[sample[i]];
    try {
      return TrialOutcome{kendall_tau_b(reference, sub_means), attempt};
    } catch (const UndefinedError&) {
      // Entirely tied sample: draw again.
    }
  }
  throw UndefinedError("subset experiment: tau undefined for " +
                       std::to_string(config.max_attempts_per_trial) + " draws in trial " +
                       std::to_string(trial));
}

SubsetExperimentResult run_subset(const Campaign& campaign, const MetricConfig& metric,
                                  const SubsetExperimentConfig& config, bool parallel) {
  metric.validate();
  const int n_sys = static_cast<int>(campaign.num_systems());
  if (config.subset_size < 2 || config.subset_size > n_sys)
    throw ConfigError("subset size N=" + std::to_string(config.subset_size) + " must lie in [2, " +
                      std::to_string(n_sys) + "]");
  if (config.trials < 1) throw ConfigError("subset experiment needs at least 1 trial");

  const int threads = resolve_threads(config.threads);
  const auto full_index = RarityIndex::build(campaign, config.count_depth);
  EvalOptions full_options;
  full_options.threads = parallel ? threads : 1;
  const auto full_means = mean_scores(evaluate_campaign(campaign, full_index, metric, full_options));

  std::vector<TrialOutcome> outcomes(static_cast<std::size_t>(config.trials));
  if (parallel) {
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic) num_threads(threads)
    for (int trial = 0; trial < config.trials; ++trial) {
      try {
        outcomes[static_cast<std::size_t>(trial)] =
            subset_trial(campaign, metric, config, full_means, trial);
      } catch (...) {
#pragma omp critical(rareval_subset_failure)
        if (!failure) failure = std::current_exception();
      }
    }
    if (failure) std::rethrow_exception(failure);
  } else {
    for (int trial = 0; trial < config.trials; ++trial)
      outcomes[static_cast<std::size_t>(trial)] = subset_trial(campaign, metric, config, full_means, trial);
  }

  SubsetExperimentResult result;
  result.subset_size = config.subset_size;
  result.trials = config.trials;
  double sum = 0.0;
  for (const auto& o : outcomes) {
    sum += o.tau;
    result.resamples += o.resamples;
  }
  result.mean_tau = sum / config.trials;
  return result;
}

}  // namespace

double kendall_tau_b(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ConfigError("kendall tau: inputs differ in length");
  const std::size_t n = x.size();
  if (n < 2) throw ConfigError("kendall tau needs at least 2 items");
  long long concordant = 0, discordant = 0, ties_x = 0, ties_y = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const int dx = sign(x[i] - x[j]);
      const int dy = sign(y[i] - y[j]);
      if (dx == 0) ++ties_x;
      if (dy == 0) ++ties_y;
      if (dx == 0 || dy == 0) continue;
      if (dx == dy)
        ++concordant;
      else
        ++discordant;
    }
  const long long pairs = static_cast<long long>(n * (n - 1) / 2);
  if (ties_x == pairs || ties_y == pairs)
    throw UndefinedError("kendall tau undefined: one ranking is entirely tied");
  // One square root of the product keeps tau exactly 1 for identical inputs.
  const double denom =
      std::sqrt(static_cast<double>(pairs - ties_x) * static_cast<double>(pairs - ties_y));
  return static_cast<double>(concordant - discordant) / denom;
}

double kendall_tau(const SystemRanking& a, const SystemRanking& b) {
  if (a.entries.size() != b.entries.size())
    throw ConfigError("kendall tau: rankings cover different numbers of systems");
  std::map<std::string, double> b_rank;
  for (const auto& e : b.entries) b_rank.emplace(e.system_id, e.rank);
  std::vector<double> x, y;
  for (const auto& e : a.entries) {
    auto it = b_rank.find(e.system_id);
    if (it == b_rank.end())
      throw ConfigError("kendall tau: system '" + e.system_id + "' missing from one ranking");
    x.push_back(e.rank);
    y.push_back(it->second);
  }
  return kendall_tau_b(x, y);
}

DiscriminativePower discriminative_power(const ScoreMatrix& matrix, double level) {
  if (!(level > 0.0 && level < 1.0)) throw ConfigError("significance level must lie in (0, 1)");
  const auto topics = active_topics(matrix);
  const std::size_t n_sys = matrix.systems.size();
  const std::size_t n_top = topics.size();
  if (n_sys < 2 || n_top < 2)
    throw ConfigError("discriminative power needs at least 2 systems and 2 topics");

  std::vector<double> row(n_sys, 0.0), col(n_top, 0.0);
  double grand = 0.0;
  for (std::size_t s = 0; s < n_sys; ++s)
    for (std::size_t t = 0; t < n_top; ++t) {
      const double v = matrix.at(s, topics[t]);
      row[s] += v;
      col[t] += v;
      grand += v;
    }
  for (auto& r : row) r /= static_cast<double>(n_top);
  for (auto& c : col) c /= static_cast<double>(n_sys);
  grand /= static_cast<double>(n_sys * n_top);

  double sse = 0.0;
  for (std::size_t s = 0; s < n_sys; ++s)
    for (std::size_t t = 0; t < n_top; ++t) {
      const double e = matrix.at(s, topics[t]) - row[s] - col[t] + grand;
      sse += e * e;
    }

  DiscriminativePower out;
  out.level = level;
  out.df = static_cast<int>((n_sys - 1) * (n_top - 1));
  out.total_pairs = static_cast<int>(n_sys * (n_sys - 1) / 2);
  out.residual_mean_square = sse / out.df;

  double threshold = kZeroResidual;
  if (out.residual_mean_square > kZeroResidual) {
    out.q_critical = studentized_range_quantile(level, static_cast<int>(n_sys), out.df);
    out.critical_difference =
        out.q_critical * std::sqrt(out.residual_mean_square / static_cast<double>(n_top));
    threshold = out.critical_difference;
  }
  for (std::size_t a = 0; a < n_sys; ++a)
    for (std::size_t b = a + 1; b < n_sys; ++b)
      if (std::abs(row[a] - row[b]) > threshold) ++out.significant_pairs;
  return out;
}

StabilityResult stability(const ScoreMatrix& matrix, const StabilityConfig& config) {
  return run_stability(matrix, config, true);
}

SubsetExperimentResult subset_experiment(const Campaign& campaign, const MetricConfig& metric,
                                         const SubsetExperimentConfig& config) {
  return run_subset(campaign, metric, config, true);
}

namespace reference {

StabilityResult stability(const ScoreMatrix& matrix, const StabilityConfig& config) {
  return run_stability(matrix, config, false);
}

SubsetExperimentResult subset_experiment(const Campaign& campaign, const MetricConfig& metric,
                                         const SubsetExperimentConfig& config) {
  return run_subset(campaign, metric, config, false);
}

}  // namespace reference

}  // namespace rareval
