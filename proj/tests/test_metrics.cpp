#include <gtest/gtest.h>

#include <random>

#include "rareval/error.hpp"
#include "rareval/evaluation.hpp"
#include "rareval/metrics.hpp"
#include "support.hpp"

namespace rareval {
namespace {

using testing::to_campaign;
using testing::toy4;

// toy4 system B: d1 (S_d=4), d3 (S_d=1), d5 (non-relevant).
std::vector<JudgedDoc> toy4_b(RarityVariant variant) {
  const double r_d1 = rarity_value(4, 4, variant);
  const double r_d3 = rarity_value(1, 4, variant);
  return {{true, r_d1}, {true, r_d3}, {false, 0.0}};
}

std::vector<JudgedDoc> random_ranking(std::mt19937_64& rng, std::size_t n) {
  std::bernoulli_distribution rel(0.4);
  std::uniform_real_distribution<double> r(0.0, 1.0);
  std::vector<JudgedDoc> out(n);
  for (auto& d : out) d = {rel(rng), r(rng)};
  return out;
}

TEST(Precision, Toy4AndEdges) {
  const auto b = toy4_b(RarityVariant::kEq2);
  EXPECT_DOUBLE_EQ(precision_at_k(b, 3), 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(precision_at_k({}, 5), 0.0);
  std::vector<JudgedDoc> all(5, {true, 0.3});
  EXPECT_DOUBLE_EQ(precision_at_k(all, 5), 1.0);
  // positions past the end of the ranking count as misses
  EXPECT_DOUBLE_EQ(precision_at_k(all, 10), 0.5);
}

TEST(PrecisionRareness, Toy4) {
  const auto b = toy4_b(RarityVariant::kEq2);
  EXPECT_NEAR(p_at_k_rareness(b, 3, 1.0), (1.0 + 1.75) / 3.0, 1e-15);
  EXPECT_NEAR(p_at_k_rareness(b, 3, 1.0), 0.9166666666666666, 1e-15);
}

// All k documents relevant and unique: every gain is 1 + (S-1)/S.
TEST(PrecisionRareness, ExtremalValue) {
  for (int S : {2, 3, 4, 10, 64}) {
    const double r = rarity_value(1, S, RarityVariant::kEq2);
    std::vector<JudgedDoc> unique(100, {true, r});
    const double v = p_at_k_rareness(unique, 100, 1.0);
    EXPECT_NEAR(v, (2.0 * S - 1) / S, 1e-12);
    EXPECT_LT(v, 2.0);
  }
}

TEST(PrecisionMixture, Toy4AndBounds) {
  const auto b = toy4_b(RarityVariant::kRevised);
  EXPECT_DOUBLE_EQ(p_at_k_mixture(b, 3, 0.5), 0.5);
  EXPECT_EQ(p_at_k_mixture(b, 3, 0.0), precision_at_k(b, 3));
  std::vector<JudgedDoc> unique(7, {true, 1.0});
  EXPECT_DOUBLE_EQ(p_at_k_mixture(unique, 7, 1.0), 1.0);
}

TEST(AveragePrecision, Toy4AndEdges) {
  const auto b = toy4_b(RarityVariant::kEq2);
  EXPECT_NEAR(*average_precision(b, 3, 3), 2.0 / 3.0, 1e-15);
  const std::vector<JudgedDoc> one = {{true, 0.0}};
  EXPECT_DOUBLE_EQ(*average_precision(one, 1, 1), 1.0);
  const std::vector<JudgedDoc> none = {{false, 0}, {false, 0}};
  EXPECT_DOUBLE_EQ(*average_precision(none, 2, 4), 0.0);
  EXPECT_FALSE(average_precision(b, 3, 0).has_value());
  EXPECT_FALSE(ap_rareness(b, 3, 1.0, 0).has_value());
}

TEST(AveragePrecisionRareness, Toy4) {
  const auto b = toy4_b(RarityVariant::kEq2);
  EXPECT_NEAR(*ap_rareness(b, 3, 1.0, 3), 2.375 / 3.0, 1e-15);
  const std::vector<JudgedDoc> none = {{false, 0}};
  EXPECT_DOUBLE_EQ(*ap_rareness(none, 1, 1.0, 2), 0.0);
}

TEST(AveragePrecision, DepthBoundsTheSum) {
  const std::vector<JudgedDoc> r = {{false, 0}, {true, 0}, {true, 0}};
  EXPECT_DOUBLE_EQ(*average_precision(r, 2, 2), 0.25);
  EXPECT_NEAR(*average_precision(r, 3, 2), (0.5 + 2.0 / 3.0) / 2, 1e-15);
}

TEST(Reversion, AlphaZeroIsBitIdentical) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<std::size_t> len(0, 150);
  for (int trial = 0; trial < 500; ++trial) {
    const auto r = random_ranking(rng, len(rng));
    for (int k : {1, 5, 10, 100}) {
      EXPECT_EQ(p_at_k_rareness(r, k, 0.0), precision_at_k(r, k));
      EXPECT_EQ(p_at_k_mixture(r, k, 0.0), precision_at_k(r, k));
      const std::size_t depth = std::min<std::size_t>(k, r.size());
      EXPECT_EQ(ap_rareness(r, depth, 0.0, 30), average_precision(r, depth, 30));
    }
  }
}

TEST(Properties, BoundsAndMonotonicity) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<std::size_t> len(0, 120);
  for (int trial = 0; trial < 500; ++trial) {
    const auto r = random_ranking(rng, len(rng));
    int nr = 0;
    for (const auto& d : r) nr += d.relevant;
    nr += 3;
    const int k = 100;
    const double p = precision_at_k(r, k);
    double prev = -1.0;
    for (double alpha : {0.0, 0.25, 0.5, 1.0}) {
      const double pr = p_at_k_rareness(r, k, alpha);
      EXPECT_GE(pr, p);
      EXPECT_LT(pr, 2.0);
      EXPECT_GE(pr, prev);
      prev = pr;
      const double mix = p_at_k_mixture(r, k, alpha);
      EXPECT_GE(mix, 0.0);
      EXPECT_LE(mix, 1.0);
    }
    const std::size_t depth = std::min<std::size_t>(k, r.size());
    const double ap = *average_precision(r, depth, nr);
    EXPECT_GE(ap, 0.0);
    EXPECT_LE(ap, 1.0);
    EXPECT_GE(*ap_rareness(r, depth, 1.0, nr), ap);
    EXPECT_LT(*ap_rareness(r, depth, 1.0, nr), 2.0);
  }
}

TEST(MetricNames, ParseAndFormat) {
  EXPECT_EQ(parse_metric("P@100").name(), "P@100");
  EXPECT_EQ(parse_metric("AP").name(), "AP");
  MetricDefaults d;
  d.alpha = 0.5;
  EXPECT_EQ(parse_metric("P@100_rareness", d).name(), "P@100_rareness(alpha=0.5,rarity=eq2)");
  EXPECT_EQ(parse_metric("P@10_mixture", d).name(), "P@10_mixture(alpha=0.5,rarity=revised)");
  d.cutoff = 20;
  EXPECT_EQ(parse_metric("P@k", d).cutoff, 20);
  EXPECT_EQ(parse_metric("AP_rareness", d).name(), "AP_rareness(alpha=0.5,rarity=eq2,k=20)");

  const MetricConfig m = parse_metric("AP_rareness(alpha=1,rarity=revised,k=50,depth=full)");
  EXPECT_EQ(m.family, MetricFamily::kAveragePrecision);
  EXPECT_EQ(m.formulation, Formulation::kAdditive);
  EXPECT_DOUBLE_EQ(m.alpha, 1.0);
  EXPECT_EQ(m.rarity, RarityVariant::kRevised);
  EXPECT_EQ(m.cutoff, 50);
  EXPECT_EQ(m.ap_depth, ApDepth::kFull);
  EXPECT_EQ(parse_metric(m.name()), m);
}

TEST(MetricNames, Errors) {
  EXPECT_THROW(parse_metric("NDCG"), ConfigError);
  EXPECT_THROW(parse_metric("P@0"), ConfigError);
  EXPECT_THROW(parse_metric("P@x"), ConfigError);
  EXPECT_THROW(parse_metric("AP_mixture"), ConfigError);
  EXPECT_THROW(parse_metric("P@5_mixture(alpha=1.5)"), ConfigError);
  EXPECT_THROW(parse_metric("P@5_rareness(alpha=-1)"), ConfigError);
  EXPECT_THROW(parse_metric("P@5_rareness(beta=1)"), ConfigError);
  try {
    parse_metric("bogus");
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("P@k_rareness"), std::string::npos);
  }
}

TEST(MetricNames, AlphaAboveOneIsAllowedButFlagged) {
  const MetricConfig m = parse_metric("P@10_rareness(alpha=2)");
  EXPECT_TRUE(m.alpha_out_of_recommended_range());
  EXPECT_FALSE(parse_metric("P@10_rareness(alpha=1)").alpha_out_of_recommended_range());
}

TEST(MetricNames, BaseMetric) {
  EXPECT_EQ(base_metric(parse_metric("AP_rareness(alpha=1)")).name(), "AP");
  EXPECT_EQ(base_metric(parse_metric("P@20_mixture(alpha=1)")).name(), "P@20");
}

TEST(EffectiveCount, SelfCountedBeyondDepth) {
  EXPECT_EQ(effective_count(3, 10, std::nullopt), 3);
  EXPECT_EQ(effective_count(3, 4, 5), 3);
  EXPECT_EQ(effective_count(3, 5, 5), 4);
  EXPECT_EQ(effective_count(0, 7, 5), 1);
}

TEST(ScoreRanking, Toy4ThroughStrings) {
  const Campaign c = to_campaign(toy4());
  const auto index = RarityIndex::build(c);
  const auto& b = c.runs()[1].ranking("t1");
  EXPECT_NEAR(*score_ranking(parse_metric("P@3"), b, c.qrels(), "t1", index), 2.0 / 3, 1e-15);
  EXPECT_NEAR(*score_ranking(parse_metric("P@3_rareness(alpha=1)"), b, c.qrels(), "t1", index),
              0.9166666666666666, 1e-15);
  EXPECT_NEAR(*score_ranking(parse_metric("AP_rareness(alpha=1,k=3)"), b, c.qrels(), "t1", index),
              2.375 / 3, 1e-15);
  EXPECT_NEAR(*score_ranking(parse_metric("P@3_mixture(alpha=0.5)"), b, c.qrels(), "t1", index), 0.5,
              1e-15);
}

// Every production path against the brute-force evaluator.
TEST(Oracle, RandomSmallCampaigns) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 150; ++trial) {
    const naive::Collection col = testing::random_collection(rng, 5, 4, 10, 10);
    const Campaign c = to_campaign(col);
    for (std::optional<int> depth : {std::optional<int>{}, std::optional<int>{3}}) {
      const auto index = RarityIndex::build(c, depth);
      for (int k : {1, 3, 10}) {
        for (double alpha : {0.0, 0.5, 1.0}) {
          for (bool revised : {false, true}) {
            struct Case {
              std::string name;
              naive::Kind kind;
            };
            const std::string params = "(alpha=" + std::to_string(alpha) +
                                       ",rarity=" + (revised ? "revised" : "eq2") +
                                       ",k=" + std::to_string(k) + ")";
            const std::vector<Case> cases = {
                {"P@" + std::to_string(k), naive::Kind::kP},
                {"AP(k=" + std::to_string(k) + ")", naive::Kind::kAP},
                {"P@" + std::to_string(k) + "_rareness" + params, naive::Kind::kPRare},
                {"P@" + std::to_string(k) + "_mixture" + params, naive::Kind::kPMix},
                {"AP_rareness" + params, naive::Kind::kAPRare}};
            for (const auto& cs : cases) {
              const MetricConfig m = parse_metric(cs.name);
              const ScoreMatrix mat = evaluate_campaign(c, index, m);
              naive::Query q{cs.kind, k, alpha, revised, depth};
              for (std::size_t s = 0; s < mat.systems.size(); ++s)
                for (std::size_t t = 0; t < mat.topics.size(); ++t) {
                  const auto expect = naive::score(col, s, mat.topics[t], q);
                  if (!expect) {
                    EXPECT_TRUE(mat.skipped[t]) << cs.name;
                    continue;
                  }
                  if (mat.skipped[t]) continue;  // P@k with skip_empty_topics
                  ASSERT_NEAR(mat.at(s, t), *expect, 1e-12)
                      << cs.name << " system " << s << " topic " << mat.topics[t];
                }
            }
          }
        }
      }
    }
  }
}

}  // namespace
}  // namespace rareval
