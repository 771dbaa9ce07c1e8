#include "poolforge/simulate.h"

#include <cmath>
#include <set>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "fixture.h"
#include "test_util.h"

namespace poolforge {
namespace {

using nlohmann::json;

class SimulateTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() { fixture_ = new Fixture(make_fixture()); }
  static void TearDownTestSuite() { delete fixture_; }

  static const Qrels &qrels() { return fixture_->collection.qrels; }
  static const VectorStore &vectors() { return fixture_->vectors; }
  static const std::vector<SystemRun> &runs() { return fixture_->collection.runs; }
  static const std::string &topic(int i) {
    return fixture_->collection.topics[i];
  }

  static Fixture *fixture_;
};

Fixture *SimulateTest::fixture_ = nullptr;

TEST(BatchSize, CeilRule) {
  EXPECT_EQ(batch_size_for(0.1, 200), 20);
  EXPECT_EQ(batch_size_for(0.1, 10), 1);
  EXPECT_EQ(batch_size_for(0.1, 5), 1);
  EXPECT_EQ(batch_size_for(0.15, 10), 2);
  EXPECT_EQ(batch_size_for(0.1, 201), 21);
}

TEST(HybridLabels, Examples) {
  VectorStore vs;
  vs.vectors["a"] = SparseVector{{{0, 1.0}}};
  vs.vectors["b"] = SparseVector{{{0, -1.0}}};
  vs.vectors["c"] = SparseVector{};
  LogisticModel zero;
  zero.weights = {0.0};
  const std::vector<std::string> pool = {"a", "b", "c"};
  EXPECT_EQ(hybrid_labels({}, zero, pool, vs),
            (LabelMap{{"a", 0}, {"b", 0}, {"c", 0}}));
  EXPECT_EQ(hybrid_labels({{"a", 1}, {"b", 0}, {"c", 1}}, zero, pool, vs),
            (LabelMap{{"a", 1}, {"b", 0}, {"c", 1}}));
  LogisticModel strong;
  strong.weights = {10.0};
  // p(a) ~ 0.99995 but the human said 0.
  EXPECT_EQ(hybrid_labels({{"a", 0}}, strong, pool, vs),
            (LabelMap{{"a", 0}, {"b", 0}, {"c", 0}}));
  EXPECT_EQ(hybrid_labels({}, strong, pool, vs),
            (LabelMap{{"a", 1}, {"b", 0}, {"c", 0}}));
}

TEST(SimulationConfigJson, RoundTripAndErrors) {
  SimulationConfig cfg;
  cfg.strategy = SelectionStrategy::kSAL;
  cfg.seed.kind = SeedKind::kRDS;
  cfg.train.oversample = false;
  cfg.train.l2_lambda = 0.5;
  cfg.batch_fraction = 0.2;
  cfg.budget = 40;
  cfg.rng_seed = 12345678901234ull;
  cfg.betas = {1.0, 2.0};
  cfg.rds_system = "sysB";
  const SimulationConfig back =
      simulation_config_from_json(simulation_config_to_json(cfg));
  EXPECT_EQ(simulation_config_to_json(back), simulation_config_to_json(cfg));
  EXPECT_EQ(back.budget, cfg.budget);
  EXPECT_EQ(back.rng_seed, cfg.rng_seed);

  const SimulationConfig partial =
      simulation_config_from_json(R"({"budget": null, "batch_fraction": 0.5})", cfg);
  EXPECT_FALSE(partial.budget.has_value());
  EXPECT_EQ(partial.batch_fraction, 0.5);
  EXPECT_EQ(partial.strategy, SelectionStrategy::kSAL);

  EXPECT_THROW_CODE(simulation_config_from_json(R"({"bogus": 1})"),
                    ErrorCode::kInvalidConfig);
  EXPECT_THROW_CODE(simulation_config_from_json(R"({"strategy": "XYZ"})"),
                    ErrorCode::kInvalidConfig);
  EXPECT_THROW_CODE(simulation_config_from_json(R"({"batch_fraction": 0})"),
                    ErrorCode::kInvalidConfig);
  EXPECT_THROW_CODE(simulation_config_from_json("{"), ErrorCode::kParse);
}

TEST_F(SimulateTest, RunTopicConvergesAndSnapshotsFollowCostRule) {
  for (auto strategy : {SelectionStrategy::kSPL, SelectionStrategy::kSAL,
                        SelectionStrategy::kCAL}) {
    SimulationConfig cfg;
    cfg.strategy = strategy;
    cfg.rng_seed = 3;
    const TopicResult r = run_topic(topic(0), qrels(), nullptr, vectors(), cfg);
    ASSERT_FALSE(r.discarded);
    EXPECT_EQ(r.seed_cost, 10);
    ASSERT_EQ(r.snapshots.size(), cfg.cost_points.size());
    const auto pool = qrels().pool(topic(0));
    EXPECT_EQ(r.pool_size, static_cast<std::int64_t>(pool.size()));

    // Batches: ten single-doc seed batches, then rounds of u.
    const int u = batch_size_for(cfg.batch_fraction, pool.size());
    std::set<std::string> seen;
    for (std::size_t i = 0; i < r.batches.size(); ++i) {
      if (i < 10) {
        EXPECT_EQ(r.batches[i].size(), 1u);
      } else if (i + 1 < r.batches.size()) {
        EXPECT_EQ(r.batches[i].size(), static_cast<std::size_t>(u));
      }
      for (const auto &d : r.batches[i]) EXPECT_TRUE(seen.insert(d).second) << d;
    }
    EXPECT_EQ(seen.size(), pool.size());

    for (const auto &s : r.snapshots) {
      const auto target = static_cast<std::int64_t>(std::floor(
          s.human_fraction * static_cast<double>(pool.size()) + 1e-9));
      // The seed-only state stands in when the seed alone exceeds the target.
      EXPECT_TRUE(s.human_count <= target || s.human_count == r.seed_cost)
          << s.human_fraction;
      if (s.human_count < target) {
        EXPECT_GT(s.human_count + u, target) << "a later state fits";
      }
      EXPECT_EQ(s.human_judged.size(), static_cast<std::size_t>(s.human_count));
      EXPECT_EQ(s.hybrid_labels.size(), pool.size());
      for (const auto &[doc, label] : s.human_judged) {
        EXPECT_EQ(s.hybrid_labels.at(doc), label);
        EXPECT_EQ(qrels().find(topic(0), doc)->label, label);
      }
      EXPECT_EQ(s.confusion.total(), static_cast<std::int64_t>(pool.size()));
    }
    EXPECT_EQ(r.snapshots.back().f_beta_scores.at(1.0), 1.0);
    EXPECT_EQ(r.snapshots.back().human_count,
              static_cast<std::int64_t>(pool.size()));
  }
}

TEST_F(SimulateTest, Deterministic) {
  SimulationConfig cfg;
  cfg.strategy = SelectionStrategy::kSPL;
  cfg.rng_seed = 11;
  const auto a = run_collection(fixture_->collection.topics, qrels(), vectors(),
                                cfg, runs());
  const auto b = run_collection(fixture_->collection.topics, qrels(), vectors(),
                                cfg, runs(), 2);
  EXPECT_EQ(collection_results_to_json({a}), collection_results_to_json({b}));
  EXPECT_EQ(curves_csv({a}), curves_csv({b}));
  cfg.rng_seed = 12;
  const auto c = run_collection(fixture_->collection.topics, qrels(), vectors(),
                                cfg, runs());
  EXPECT_NE(collection_results_to_json({a}), collection_results_to_json({c}));
}

TEST_F(SimulateTest, BudgetBelowBatchStopsAfterSeed) {
  SimulationConfig cfg;
  const int u = batch_size_for(cfg.batch_fraction, qrels().pool(topic(0)).size());
  cfg.budget = 10 + u - 1;
  const TopicResult r = run_topic(topic(0), qrels(), nullptr, vectors(), cfg);
  EXPECT_EQ(r.batches.size(), 10u);
  for (const auto &s : r.snapshots) EXPECT_EQ(s.human_count, 10);
  cfg.budget = 10 + u;
  EXPECT_EQ(run_topic(topic(0), qrels(), nullptr, vectors(), cfg).batches.size(),
            11u);
}

TEST_F(SimulateTest, SingleDocBatches) {
  SimulationConfig cfg;
  cfg.batch_fraction = 0.01;
  cfg.budget = 20;
  const TopicResult r = run_topic(topic(1), qrels(), nullptr, vectors(), cfg);
  ASSERT_EQ(r.batches.size(), 20u);
  for (const auto &b : r.batches) EXPECT_EQ(b.size(), 1u);
}

TEST_F(SimulateTest, RdsSeeding) {
  SimulationConfig cfg;
  cfg.seed.kind = SeedKind::kRDS;
  EXPECT_THROW_CODE(run_topic(topic(0), qrels(), nullptr, vectors(), cfg),
                    ErrorCode::kInvalidConfig);
  const SystemRun &run = choose_rds_run(cfg, runs());
  const TopicResult r = run_topic(topic(0), qrels(), &run, vectors(), cfg);
  if (!r.discarded) {
    EXPECT_EQ(r.snapshots.back().f_beta_scores.at(1.0), 1.0);
    for (std::int64_t i = 0; i < r.seed_cost; ++i) {
      EXPECT_EQ(r.batches[i].size(), 1u);
    }
  }
  cfg.rds_system = runs()[2].system_id;
  EXPECT_EQ(&choose_rds_run(cfg, runs()), &runs()[2]);
  cfg.rds_system = "missing";
  EXPECT_THROW_CODE(choose_rds_run(cfg, runs()), ErrorCode::kInvalidConfig);
  EXPECT_THROW_CODE(choose_rds_run(SimulationConfig{}, {}),
                    ErrorCode::kInvalidConfig);
}

TEST_F(SimulateTest, DiscardedTopicsAndErrors) {
  Qrels q;
  for (int i = 0; i < 4; ++i) q.set("t", "d" + std::to_string(i), 1);
  for (int i = 4; i < 40; ++i) q.set("t", "d" + std::to_string(i), 0);
  const TopicResult r = run_topic("t", q, nullptr, vectors(), SimulationConfig{});
  EXPECT_TRUE(r.discarded);
  EXPECT_TRUE(r.snapshots.empty());
  EXPECT_THROW_CODE(run_collection({"t"}, q, vectors(), SimulationConfig{}, {}),
                    ErrorCode::kEmptyResult);
  EXPECT_THROW_CODE(run_topic("nope", q, nullptr, vectors(), SimulationConfig{}),
                    ErrorCode::kNotFound);
}

TEST_F(SimulateTest, CollectionAveragesAndOutputs) {
  SimulationConfig cfg;
  cfg.rng_seed = 5;
  const auto r = run_collection(fixture_->collection.topics, qrels(), vectors(),
                                cfg, runs());
  ASSERT_EQ(r.topics.size(), fixture_->collection.topics.size());
  const auto kept = r.kept_topics();
  for (double beta : cfg.betas) {
    const auto &curve = r.average_curves.at(beta);
    ASSERT_EQ(curve.size(), cfg.cost_points.size());
    for (std::size_t i = 0; i < curve.size(); ++i) {
      double sum = 0;
      for (const auto *t : kept) sum += t->snapshots[i].f_beta_scores.at(beta);
      EXPECT_NEAR(curve[i], sum / kept.size(), 1e-12);
    }
    EXPECT_NEAR(r.average_auc.at(beta), auc_trapezoid(cfg.cost_points, curve),
                1e-12);
    EXPECT_EQ(curve.back(), 1.0);
  }

  const auto back =
      collection_results_from_json(collection_results_to_json({r}));
  ASSERT_EQ(back.size(), 1u);
  EXPECT_EQ(collection_results_to_json(back), collection_results_to_json({r}));

  EXPECT_EQ(curves_csv({r}).substr(0, curves_csv({r}).find('\n')),
            "topic,strategy,cost_point,beta,score");
  EXPECT_EQ(auc_csv({r}).substr(0, auc_csv({r}).find('\n')),
            "topic,strategy,beta,auc");
  const std::string bins = bins_csv({r}, 4);
  EXPECT_EQ(bins.substr(0, bins.find('\n')),
            "strategy,bin,prevalence_low,prevalence_high,num_topics,beta,auc");
  EXPECT_NE(curves_csv({r}).find("\nAVG,CAL,"), std::string::npos);
}

TEST(PrevalenceBins, SingleProfileIsOneBin) {
  const Fixture f = make_fixture(small_spec(3, 100, {0.054}));
  SimulationConfig cfg;
  cfg.cost_points = {0.0, 0.5, 1.0};
  const auto r = run_collection(f.collection.topics, f.collection.qrels,
                                f.vectors, cfg, f.collection.runs);
  const auto bins = bin_by_prevalence(r, 4);
  ASSERT_EQ(bins.size(), 1u);
  EXPECT_EQ(bins[0].topics.size(), r.kept_topics().size());
}

TEST(AverageCurve, IdenticalTopicsAverageToEither) {
  CollectionResult r;
  r.cost_points = {0.0, 1.0};
  r.betas = {1.0};
  for (const char *id : {"a", "b"}) {
    TopicResult t;
    t.topic_id = id;
    for (double c : r.cost_points) {
      CostSnapshot s;
      s.human_fraction = c;
      s.f_beta_scores[1.0] = 0.3 + 0.7 * c;
      t.snapshots.push_back(s);
    }
    r.topics.push_back(t);
  }
  EXPECT_NEAR(r.topics[0].auc(1.0), 0.65, 1e-15);
  EXPECT_NEAR(r.topics[1].auc(1.0), r.topics[0].auc(1.0), 0.0);
}

}  // namespace
}  // namespace poolforge
