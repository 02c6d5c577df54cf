#include <gtest/gtest.h>

#include <random>

#include "rareval/error.hpp"
#include "rareval/evaluation.hpp"
#include "rareval/synth.hpp"
#include "support.hpp"

namespace rareval {
namespace {

using testing::make_run;
using testing::to_campaign;
using testing::toy4;

ScoreMatrix matrix(std::vector<std::string> systems, std::vector<std::string> topics,
                   std::vector<double> values, std::vector<std::uint8_t> skipped = {}) {
  ScoreMatrix m;
  m.systems = std::move(systems);
  m.topics = std::move(topics);
  m.values = std::move(values);
  m.skipped = skipped.empty() ? std::vector<std::uint8_t>(m.topics.size(), 0) : std::move(skipped);
  return m;
}

TEST(EvaluateCampaign, Toy4Rows) {
  const Campaign c = to_campaign(toy4());
  const auto index = RarityIndex::build(c);
  const std::vector<MetricConfig> metrics = {parse_metric("P@3"), parse_metric("P@3_rareness(alpha=1)")};
  const auto out = evaluate_campaign(c, index, metrics);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].systems, (std::vector<std::string>{"A", "B", "C", "D"}));
  EXPECT_EQ(out[0].topics, std::vector<std::string>{"t1"});
  EXPECT_NEAR(out[0].at(1, 0), 2.0 / 3, 1e-15);
  EXPECT_NEAR(out[1].at(1, 0), 0.9166666666666666, 1e-15);
}

TEST(EvaluateCampaign, MissingTopicScoresZero) {
  naive::Collection col = toy4();
  col.grades["t2"] = {{"x", 1}};
  col.systems[0].ranked["t2"] = {"x"};
  const Campaign c = to_campaign(col);
  const auto m = evaluate_campaign(c, RarityIndex::build(c), parse_metric("P@1"));
  ASSERT_EQ(m.topics.size(), 2u);
  EXPECT_DOUBLE_EQ(m.at(0, 1), 1.0);
  EXPECT_DOUBLE_EQ(m.at(1, 1), 0.0);
}

TEST(EvaluateCampaign, OnlyJudgedTopicsAndExplicitSelection) {
  naive::Collection col = toy4();
  col.systems[0].ranked["t9"] = {"x"};
  const Campaign c = to_campaign(col);
  const auto index = RarityIndex::build(c);
  EXPECT_EQ(evaluate_campaign(c, index, parse_metric("P@1")).topics, std::vector<std::string>{"t1"});

  EvalOptions opts;
  opts.topics = {"t1"};
  opts.systems = {2, 0};
  const auto m = evaluate_campaign(c, index, parse_metric("P@3"), opts);
  EXPECT_EQ(m.systems, (std::vector<std::string>{"C", "A"}));

  opts.topics = {"nope"};
  EXPECT_THROW(evaluate_campaign(c, index, parse_metric("P@3"), opts), DataError);
}

TEST(EvaluateCampaign, NoJudgedTopicsIsAnError) {
  const Campaign c({make_run("A", {{"t1", {"d1"}}})}, Qrels{});
  EXPECT_THROW(evaluate_campaign(c, RarityIndex::build(c), parse_metric("P@1")), DataError);
}

TEST(EvaluateCampaign, ApSkipsTopicsWithoutRelevant) {
  naive::Collection col = toy4();
  col.grades["t2"] = {{"x", 0}};
  const Campaign c = to_campaign(col);
  const auto index = RarityIndex::build(c);
  const auto ap = evaluate_campaign(c, index, parse_metric("AP"));
  EXPECT_EQ(ap.skipped, (std::vector<std::uint8_t>{0, 1}));
  const auto p = evaluate_campaign(c, index, parse_metric("P@3"));
  EXPECT_EQ(p.skipped, (std::vector<std::uint8_t>{0, 0}));
  MetricDefaults d;
  d.skip_empty_topics = true;
  EXPECT_EQ(evaluate_campaign(c, index, parse_metric("P@3", d)).skipped, (std::vector<std::uint8_t>{0, 1}));
}

TEST(EvaluateCampaign, FrozenNumRelevant) {
  const Campaign c = to_campaign(toy4());
  EvalOptions opts;
  opts.frozen_num_relevant["t1"] = 6;
  const auto m = evaluate_campaign(c, RarityIndex::build(c), parse_metric("AP(k=3)"), opts);
  EXPECT_NEAR(m.at(1, 0), 2.0 / 6, 1e-15);
}

TEST(EvaluateCampaign, ParallelMatchesReference) {
  SynthSpec spec;
  spec.n_systems = 12;
  spec.n_topics = 6;
  const Campaign c = generate_campaign(spec);
  const auto index = RarityIndex::build(c, 50);
  std::vector<MetricConfig> metrics;
  for (const char* name : {"P@10", "P@100_rareness(alpha=0.5)", "P@20_mixture(alpha=0.7)", "AP",
                           "AP_rareness(alpha=1,rarity=revised)", "AP(depth=full,k=10)"})
    metrics.push_back(parse_metric(name));
  const auto serial = reference::evaluate_campaign(c, index, metrics);
  for (int threads : {1, 2, 3, 8}) {
    EvalOptions opts;
    opts.threads = threads;
    EXPECT_EQ(evaluate_campaign(c, index, metrics, opts), serial) << threads << " threads";
  }
}

TEST(MeanScores, SkipAwareDivisor) {
  EXPECT_DOUBLE_EQ(mean_scores(matrix({"A"}, {"t"}, {0.7}))[0], 0.7);
  EXPECT_DOUBLE_EQ(mean_scores(matrix({"A"}, {"t", "u"}, {0.2, 0.4}))[0], 0.30000000000000004);
  EXPECT_DOUBLE_EQ(mean_scores(matrix({"A"}, {"t", "u", "v"}, {0.2, 0.0, 0.4}, {0, 1, 0}))[0],
                   0.30000000000000004);
  EXPECT_THROW(mean_scores(matrix({"A"}, {"t"}, {0.2}, {1})), DataError);
  const auto map = mean_score_map(matrix({"A", "B"}, {"t"}, {0.1, 0.9}));
  EXPECT_DOUBLE_EQ(map.at("B"), 0.9);
}

TEST(RankSystems, Midranks) {
  const auto r = rank_systems(std::map<std::string, double>{{"A", 0.9}, {"B", 0.5}, {"C", 0.5}});
  EXPECT_EQ(r.rank_of("A"), 1.0);
  EXPECT_EQ(r.rank_of("B"), 2.5);
  EXPECT_EQ(r.rank_of("C"), 2.5);
  EXPECT_FALSE(r.rank_of("Z").has_value());

  const auto flat = rank_systems(std::map<std::string, double>{{"x", 1}, {"y", 1}, {"z", 1}});
  for (const auto& e : flat.entries) EXPECT_EQ(e.rank, 2.0);

  const std::vector<std::string> ids = {"p", "q", "r", "s"};
  const std::vector<double> means = {0.1, 0.4, 0.3, 0.2};
  const auto distinct = rank_systems(ids, means);
  EXPECT_EQ(distinct.entries[0].system_id, "q");
  EXPECT_EQ(distinct.rank_of("p"), 4.0);
  EXPECT_EQ(distinct.rank_of("s"), 3.0);
}

TEST(RankSystems, FromMatrix) {
  const auto r = rank_systems(matrix({"A", "B", "C"}, {"t", "u"}, {0.0, 0.4, 0.5, 0.5, 0.2, 0.2}));
  EXPECT_EQ(r.entries[0].system_id, "B");
  EXPECT_EQ(r.rank_of("A"), 2.5);
  EXPECT_EQ(r.rank_of("C"), 2.5);
}

}  // namespace
}  // namespace rareval
