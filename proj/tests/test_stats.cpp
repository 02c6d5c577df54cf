#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "rareval/error.hpp"
#include "rareval/stats.hpp"
#include "rareval/synth.hpp"
#include "support.hpp"

namespace rareval {
namespace {

ScoreMatrix matrix(std::size_t systems, std::size_t topics, std::vector<double> values) {
  ScoreMatrix m;
  for (std::size_t s = 0; s < systems; ++s) m.systems.push_back("s" + std::to_string(s));
  for (std::size_t t = 0; t < topics; ++t) m.topics.push_back("t" + std::to_string(t));
  m.values = std::move(values);
  m.skipped.assign(topics, 0);
  return m;
}

TEST(KendallTau, SpecValues) {
  const std::vector<double> a = {1, 2, 3}, b = {2, 1, 3}, rev = {3, 2, 1};
  EXPECT_NEAR(kendall_tau_b(a, b), 1.0 / 3.0, 1e-15);
  EXPECT_DOUBLE_EQ(kendall_tau_b(a, a), 1.0);
  EXPECT_DOUBLE_EQ(kendall_tau_b(a, rev), -1.0);
}

TEST(KendallTau, AllPermutationsOfFour) {
  std::vector<double> base = {1, 2, 3, 4};
  std::vector<double> p = base;
  int cases = 0;
  do {
    int inversions = 0;
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j) inversions += p[i] > p[j];
    EXPECT_DOUBLE_EQ(kendall_tau_b(base, p), (6.0 - 2.0 * inversions) / 6.0);
    ++cases;
  } while (std::next_permutation(p.begin(), p.end()));
  EXPECT_EQ(cases, 24);
}

TEST(KendallTau, TieCorrection) {
  // x: 1 2 2 3, y: 1 2 3 4. C=5, D=0, ties in x only: 1.
  const std::vector<double> x = {1, 2, 2, 3}, y = {1, 2, 3, 4};
  EXPECT_NEAR(kendall_tau_b(x, y), 5.0 / std::sqrt(5.0 * 6.0), 1e-15);
}

TEST(KendallTau, Errors) {
  const std::vector<double> one = {1}, two = {1, 2}, three = {1, 2, 3}, flat = {2, 2, 2};
  EXPECT_THROW(kendall_tau_b(one, one), ConfigError);
  EXPECT_THROW(kendall_tau_b(two, three), ConfigError);
  EXPECT_THROW(kendall_tau_b(flat, three), UndefinedError);
}

TEST(KendallTau, SymmetricAndRankingAligned) {
  std::mt19937_64 rng(23);
  std::uniform_int_distribution<int> v(0, 4);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> x(7), y(7);
    for (auto& e : x) e = v(rng);
    for (auto& e : y) e = v(rng);
    try {
      EXPECT_DOUBLE_EQ(kendall_tau_b(x, y), kendall_tau_b(y, x));
      EXPECT_DOUBLE_EQ(kendall_tau_b(x, x), 1.0);
    } catch (const UndefinedError&) {
    }
  }
  const auto a = rank_systems(std::map<std::string, double>{{"A", 3}, {"B", 2}, {"C", 1}});
  const auto b = rank_systems(std::map<std::string, double>{{"C", 1}, {"A", 2}, {"B", 3}});
  EXPECT_NEAR(kendall_tau(a, b), 1.0 / 3.0, 1e-15);
}

TEST(DiscriminativePower, IdenticalSystems) {
  const auto m = matrix(3, 4, {0.1, 0.5, 0.3, 0.9, 0.1, 0.5, 0.3, 0.9, 0.1, 0.5, 0.3, 0.9});
  const auto r = discriminative_power(m, 0.95);
  EXPECT_EQ(r.significant_pairs, 0);
  EXPECT_EQ(r.total_pairs, 3);
}

TEST(DiscriminativePower, ZeroResidualGuard) {
  const auto m = matrix(2, 5, {1, 1, 1, 1, 1, 0, 0, 0, 0, 0});
  const auto r = discriminative_power(m, 0.95);
  EXPECT_EQ(r.significant_pairs, 1);
  EXPECT_EQ(r.df, 4);
  EXPECT_DOUBLE_EQ(r.residual_mean_square, 0.0);
}

TEST(DiscriminativePower, KnownAnova) {
  // Two-way additive model worked by hand:
  // rows (systems) 0.2 0.4 0.6 / 0.3 0.5 0.4 / 0.8 0.9 0.7
  const auto m = matrix(3, 3, {0.2, 0.4, 0.6, 0.3, 0.5, 0.4, 0.8, 0.9, 0.7});
  const double grand = 4.8 / 9;
  const std::vector<double> row = {0.4, 0.4, 0.8}, col = {1.3 / 3, 1.8 / 3, 1.7 / 3};
  double sse = 0;
  for (int s = 0; s < 3; ++s)
    for (int t = 0; t < 3; ++t) {
      const double e = m.at(s, t) - row[s] - col[t] + grand;
      sse += e * e;
    }
  const auto r = discriminative_power(m, 0.95);
  EXPECT_EQ(r.df, 4);
  EXPECT_NEAR(r.residual_mean_square, sse / 4, 1e-14);
  EXPECT_NEAR(r.critical_difference, r.q_critical * std::sqrt(sse / 4 / 3), 1e-12);
  // q(0.95, 3, 4) from published tables: 5.04
  EXPECT_NEAR(r.q_critical, 5.04, 0.01);
}

TEST(DiscriminativePower, StricterLevelNeverFindsMore) {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> u(0, 1);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t S = 6, T = 8;
    std::vector<double> v(S * T);
    for (std::size_t s = 0; s < S; ++s)
      for (std::size_t t = 0; t < T; ++t) v[s * T + t] = 0.1 * s + 0.5 * u(rng);
    const auto m = matrix(S, T, v);
    EXPECT_LE(discriminative_power(m, 0.99).significant_pairs,
              discriminative_power(m, 0.95).significant_pairs);
  }
}

TEST(DiscriminativePower, DegenerateDf) {
  EXPECT_THROW(discriminative_power(matrix(3, 1, {0.1, 0.2, 0.3}), 0.95), ConfigError);
  EXPECT_THROW(discriminative_power(matrix(1, 3, {0.1, 0.2, 0.3}), 0.95), ConfigError);
}

StabilityConfig stab(int sample, int trials, int threads = 0) {
  StabilityConfig c;
  c.sample_size = sample;
  c.trials = trials;
  c.threads = threads;
  return c;
}

TEST(Stability, DominanceAndIdentical) {
  const auto dom = stability(matrix(2, 6, {1, 2, 3, 4, 5, 6, 0, 1, 2, 3, 4, 5}), stab(3, 200));
  ASSERT_EQ(dom.pairs.size(), 1u);
  EXPECT_DOUBLE_EQ(dom.pairs[0].stability, 1.0);
  EXPECT_EQ(dom.pairs[0].wins_a, 200);

  const auto same = stability(matrix(2, 4, {1, 2, 3, 4, 1, 2, 3, 4}), stab(2, 200));
  EXPECT_DOUBLE_EQ(same.pairs[0].stability, 0.5);
  EXPECT_EQ(same.pairs[0].ties, 200);
  EXPECT_DOUBLE_EQ(same.overall, 0.5);
}

TEST(Stability, PlantedProbability) {
  // A wins 7 of 10 topics; one-topic trials win with probability 0.7.
  std::vector<double> v(20, 0.0);
  for (int t = 0; t < 10; ++t) {
    v[t] = t < 7 ? 1.0 : 0.0;
    v[10 + t] = t < 7 ? 0.0 : 1.0;
  }
  const auto r = stability(matrix(2, 10, v), stab(1, 1000));
  const auto& p = r.pairs[0];
  EXPECT_EQ(p.wins_a + p.wins_b + p.ties, 1000);
  EXPECT_DOUBLE_EQ(p.stability, std::max(p.wins_a, p.wins_b) / 1000.0);
  EXPECT_NEAR(p.stability, 0.7, 0.045);
}

TEST(Stability, FullSetDirection) {
  std::vector<double> v(20, 0.0);
  for (int t = 0; t < 10; ++t) {
    v[t] = t < 3 ? 1.0 : 0.0;  // A wins 3 topics, loses overall
    v[10 + t] = t < 3 ? 0.0 : 1.0;
  }
  auto config = stab(1, 500);
  config.direction = StabilityDirection::kFullSet;
  const auto full = stability(matrix(2, 10, v), config);
  EXPECT_DOUBLE_EQ(full.pairs[0].stability, full.pairs[0].wins_b / 500.0);
}

TEST(Stability, ThreadCountAndSeed) {
  SynthSpec spec;
  spec.n_systems = 10;
  spec.n_topics = 12;
  const Campaign c = generate_campaign(spec);
  const auto m = evaluate_campaign(c, RarityIndex::build(c), parse_metric("P@100_rareness(alpha=1)"));
  const auto serial = reference::stability(m, stab(6, 300));
  for (int threads : {1, 2, 5}) {
    const auto par = stability(m, stab(6, 300, threads));
    ASSERT_EQ(par.pairs.size(), serial.pairs.size());
    for (std::size_t i = 0; i < par.pairs.size(); ++i) {
      EXPECT_EQ(par.pairs[i].wins_a, serial.pairs[i].wins_a);
      EXPECT_EQ(par.pairs[i].wins_b, serial.pairs[i].wins_b);
      EXPECT_EQ(par.pairs[i].stability, serial.pairs[i].stability);
    }
    EXPECT_EQ(par.overall, serial.overall);
  }
  EXPECT_GE(serial.overall, 0.5);
  EXPECT_LE(serial.overall, 1.0);
  auto other = stab(6, 300);
  other.seed = 99;
  const auto reseeded = stability(m, other);
  bool differs = false;
  for (std::size_t i = 0; i < reseeded.pairs.size(); ++i)
    differs |= reseeded.pairs[i].wins_a != serial.pairs[i].wins_a;
  EXPECT_TRUE(differs);
}

TEST(Stability, RelabelingInvariance) {
  const auto m = matrix(3, 5, {0.1, 0.4, 0.3, 0.8, 0.2, 0.3, 0.2, 0.5, 0.6, 0.1, 0.5, 0.5, 0.1, 0.2, 0.9});
  ScoreMatrix renamed = m;
  renamed.systems = {"zz", "yy", "xx"};
  EXPECT_EQ(stability(m, stab(2, 400)).overall, stability(renamed, stab(2, 400)).overall);
}

TEST(Stability, SampleLargerThanTopicsRejected) {
  EXPECT_THROW(stability(matrix(2, 3, {1, 2, 3, 4, 5, 6}), stab(4, 10)), ConfigError);
}

SubsetExperimentConfig subset(int n, int trials, int threads = 0) {
  SubsetExperimentConfig c;
  c.subset_size = n;
  c.trials = trials;
  c.threads = threads;
  return c;
}

TEST(SubsetExperiment, FullSetIsExactlyOne) {
  SynthSpec spec;
  spec.n_systems = 8;
  spec.n_topics = 5;
  const Campaign c = generate_campaign(spec);
  const auto r = subset_experiment(c, parse_metric("P@100_rareness(alpha=1)"), subset(8, 20));
  EXPECT_EQ(r.mean_tau, 1.0);
  EXPECT_EQ(r.trials, 20);
}

TEST(SubsetExperiment, DuplicatedSystemsKeepOrder) {
  naive::Collection col;
  col.systems = {{"A", {{"t", {"d1", "d2", "d3"}}}},
                 {"A2", {{"t", {"d1", "d2", "d3"}}}},
                 {"B", {{"t", {"d4", "d1", "d5"}}}},
                 {"B2", {{"t", {"d4", "d1", "d5"}}}}};
  col.grades["t"] = {{"d1", 1}, {"d2", 1}, {"d3", 1}, {"d5", 1}};
  const Campaign c = testing::to_campaign(col);
  const auto r = subset_experiment(c, parse_metric("P@3_rareness(alpha=1)"), subset(2, 100));
  EXPECT_EQ(r.mean_tau, 1.0);
  EXPECT_GT(r.resamples, 0);
}

TEST(SubsetExperiment, ParallelMatchesReference) {
  SynthSpec spec;
  spec.n_systems = 16;
  spec.n_topics = 4;
  const Campaign c = generate_campaign(spec);
  const MetricConfig metric = parse_metric("AP_rareness(alpha=1)");
  const auto serial = reference::subset_experiment(c, metric, subset(4, 60));
  for (int threads : {1, 3}) {
    const auto par = subset_experiment(c, metric, subset(4, 60, threads));
    EXPECT_EQ(par.mean_tau, serial.mean_tau);
    EXPECT_EQ(par.resamples, serial.resamples);
  }
  EXPECT_LE(serial.mean_tau, 1.0);
}

TEST(SubsetExperiment, InvalidSize) {
  const Campaign c = testing::to_campaign(testing::toy4());
  const MetricConfig metric = parse_metric("P@3");
  EXPECT_THROW(subset_experiment(c, metric, subset(1, 10)), ConfigError);
  EXPECT_THROW(subset_experiment(c, metric, subset(5, 10)), ConfigError);
}

}  // namespace
}  // namespace rareval
