#include "poolforge/session.h"

#include <sstream>
#include <thread>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "fixture.h"
#include "test_util.h"

namespace poolforge {
namespace {

using Labels = std::vector<std::pair<std::string, int>>;

class SessionTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    fixture_ = new Fixture(make_fixture(small_spec(2, 200, {0.2})));
  }
  static void TearDownTestSuite() { delete fixture_; }

  void SetUp() override { manager_ = make_manager(); }

  std::unique_ptr<SessionManager> make_manager(SessionOptions options = {}) {
    std::map<std::string, std::string, std::less<>> texts;
    for (const auto &d : fixture_->collection.documents) {
      texts.emplace(d.doc_id, d.text);
    }
    if (!options.clock) options.clock = [] { return std::int64_t{1000}; };
    auto m = std::make_unique<SessionManager>(fixture_->vectors,
                                              std::move(texts), options);
    for (const auto &t : fixture_->collection.topics) {
      m->register_topic(
          make_registration(t, qrels().pool(t), fixture_->collection.runs[0]));
    }
    return m;
  }

  static const Qrels &qrels() { return fixture_->collection.qrels; }
  static const std::string &topic() { return fixture_->collection.topics[0]; }
  static int truth(const std::string &doc) {
    return qrels().find(topic(), doc)->label;
  }

  SessionState create(std::optional<std::int64_t> budget = {},
                      const std::string &token = "") {
    CreateRequest req;
    req.topic_id = topic();
    req.client_token = token;
    req.config.budget = budget;
    return manager_->create(req);
  }

  // Judges every served batch with the qrels until the session closes or
  // `max_batches` batches were judged.
  SessionState drive(const std::string &id, int max_batches = 1 << 30) {
    SessionState st = manager_->get(id);
    for (int b = 0; b < max_batches; ++b) {
      if (st.phase != SessionPhase::kSeeding &&
          st.phase != SessionPhase::kActive) {
        break;
      }
      Labels labels;
      for (const auto &item : manager_->next_batch(id)) {
        labels.emplace_back(item.doc_id, truth(item.doc_id));
      }
      st = manager_->submit(id, labels);
    }
    return st;
  }

  static void check_budget_invariant(const SessionState &st) {
    const std::int64_t served_pending =
        st.pending_served ? static_cast<std::int64_t>(st.pending_batch.size())
                          : 0;
    EXPECT_EQ(st.budget_remaining + static_cast<std::int64_t>(st.judged.size()) +
                  served_pending,
              st.initial_budget);
    EXPECT_GE(st.budget_remaining, 0);
  }

  static Fixture *fixture_;
  std::unique_ptr<SessionManager> manager_;
};

Fixture *SessionTest::fixture_ = nullptr;

TEST_F(SessionTest, CreateDefaults) {
  const SessionState st = create(100);
  EXPECT_EQ(st.budget_remaining, 100);
  EXPECT_EQ(st.initial_budget, 100);
  EXPECT_EQ(st.pool_size, 200);
  EXPECT_EQ(st.batch_size, 20);
  EXPECT_EQ(st.phase, SessionPhase::kSeeding);
  EXPECT_EQ(st.pending_batch.size(), 1u);
  EXPECT_EQ(st.config.seed.kind, SeedKind::kRDS);
  EXPECT_EQ(create().initial_budget, 200);
}

TEST_F(SessionTest, CreateIsIdempotentPerToken) {
  const auto a = create(50, "tok");
  const auto b = create(50, "tok");
  const auto c = create(50, "other");
  EXPECT_EQ(a.session_id, b.session_id);
  EXPECT_NE(a.session_id, c.session_id);
  CreateRequest req;
  req.topic_id = "missing";
  EXPECT_THROW_CODE(manager_->create(req), ErrorCode::kNotFound);
  EXPECT_THROW_CODE(manager_->get("session-999"), ErrorCode::kNotFound);
}

TEST_F(SessionTest, SeedingWalksOneDocumentAtATime) {
  const auto id = create().session_id;
  const auto baseline = manager_->topics()[0].baseline;
  auto batch = manager_->next_batch(id);
  ASSERT_EQ(batch.size(), 1u);
  EXPECT_EQ(batch[0].doc_id, baseline[0]);
  EXPECT_FALSE(batch[0].text.empty());
  // Refetching returns the same batch without spending more budget.
  EXPECT_EQ(manager_->next_batch(id)[0].doc_id, baseline[0]);
  EXPECT_EQ(manager_->get(id).budget_remaining, 199);

  SessionState st = manager_->submit(id, {{baseline[0], 1}});
  EXPECT_EQ(st.phase, SessionPhase::kSeeding);
  batch = manager_->next_batch(id);
  ASSERT_EQ(batch.size(), 1u);
  EXPECT_EQ(batch[0].doc_id, baseline[1]);
  st = manager_->submit(id, {{baseline[1], 0}});
  EXPECT_EQ(st.phase, SessionPhase::kActive);
  EXPECT_TRUE(st.model_checkpoint.has_value());
  EXPECT_EQ(st.pending_batch.size(), 20u);
  check_budget_invariant(st);
}

TEST_F(SessionTest, SingleClassSeedingIsDiscarded) {
  const auto id = create().session_id;
  SessionState st;
  for (int i = 0; i < 100; ++i) {
    ASSERT_EQ(manager_->get(id).phase, SessionPhase::kSeeding) << i;
    const auto doc = manager_->next_batch(id)[0].doc_id;
    st = manager_->submit(id, {{doc, 1}});
  }
  EXPECT_EQ(st.phase, SessionPhase::kDiscarded);
  EXPECT_THROW_CODE(manager_->next_batch(id), ErrorCode::kConflict);
  EXPECT_THROW_CODE(manager_->export_qrels(id, ExportMode::kHybrid),
                    ErrorCode::kConflict);
  EXPECT_EQ(manager_->export_qrels(id, ExportMode::kHumanOnly).size() > 0, true);
}

TEST_F(SessionTest, BudgetTruncatesFirstBatch) {
  const auto baseline = manager_->topics()[0].baseline;
  // Budget: the seed walk up to the first document of each class, plus 5.
  std::size_t first_rel = 0, first_non = 0;
  while (truth(baseline[first_rel]) != 1) ++first_rel;
  while (truth(baseline[first_non]) != 0) ++first_non;
  const auto seed_cost =
      static_cast<std::int64_t>(std::max(first_rel, first_non) + 1);
  const auto id = create(seed_cost + 5).session_id;
  SessionState st = manager_->get(id);
  while (st.phase == SessionPhase::kSeeding) st = drive(id, 1);
  ASSERT_EQ(st.phase, SessionPhase::kActive);
  EXPECT_EQ(st.pending_batch.size(), 5u);
  st = drive(id, 1);
  EXPECT_EQ(st.phase, SessionPhase::kExhausted);
  EXPECT_EQ(st.budget_remaining, 0);
  EXPECT_THROW_CODE(manager_->next_batch(id), ErrorCode::kConflict);
}

TEST_F(SessionTest, ZeroBudgetIsExhausted) {
  const SessionState st = create(0);
  EXPECT_EQ(st.phase, SessionPhase::kExhausted);
  EXPECT_THROW_CODE(manager_->next_batch(st.session_id), ErrorCode::kConflict);
  EXPECT_THROW_CODE(manager_->submit(st.session_id, {{"x", 1}}),
                    ErrorCode::kConflict);
  EXPECT_THROW_CODE(manager_->export_qrels(st.session_id, ExportMode::kHumanOnly),
                    ErrorCode::kConflict);
}

TEST_F(SessionTest, JudgmentValidation) {
  const auto id = create().session_id;
  const auto doc = manager_->next_batch(id)[0].doc_id;
  EXPECT_THROW_CODE(manager_->submit(id, {}), ErrorCode::kValidation);
  EXPECT_THROW_CODE(manager_->submit(id, {{doc, 2}}), ErrorCode::kValidation);
  EXPECT_THROW_CODE(manager_->submit(id, {{"not-pending", 1}}),
                    ErrorCode::kValidation);
  EXPECT_THROW_CODE(manager_->submit(id, {{doc, 1}, {doc, 1}}),
                    ErrorCode::kValidation);
  manager_->submit(id, {{doc, 1}});
  EXPECT_THROW_CODE(manager_->submit(id, {{doc, 0}}), ErrorCode::kValidation);
}

TEST_F(SessionTest, PartialBatchAndVersionConflict) {
  const auto id = create().session_id;
  SessionState st = drive(id, 0);
  while (st.phase == SessionPhase::kSeeding) st = drive(id, 1);
  ASSERT_EQ(st.phase, SessionPhase::kActive);
  const auto batch = manager_->next_batch(id);
  st = manager_->get(id);
  const std::int64_t v = st.version;
  st = manager_->submit(id, {{batch[0].doc_id, truth(batch[0].doc_id)}}, v);
  EXPECT_EQ(st.pending_batch.size(), batch.size() - 1);
  EXPECT_GT(st.version, v);
  check_budget_invariant(st);
  EXPECT_THROW_CODE(
      manager_->submit(id, {{batch[1].doc_id, truth(batch[1].doc_id)}}, v),
      ErrorCode::kConflict);
  EXPECT_EQ(manager_->next_batch(id).size(), batch.size() - 1);
}

TEST_F(SessionTest, SubmitWithoutFetchSpendsBudget) {
  const SessionState created = create(30);
  const auto doc = created.pending_batch[0];
  const SessionState st = manager_->submit(created.session_id, {{doc, 1}});
  EXPECT_EQ(st.budget_remaining, 29);
  ASSERT_EQ(st.served_batches.size(), 1u);
  check_budget_invariant(st);
}

TEST_F(SessionTest, ExportLineCounts) {
  const auto id = create().session_id;
  SessionState st = manager_->get(id);
  while (st.judged.size() < 10) {
    const auto doc = manager_->next_batch(id)[0].doc_id;
    st = manager_->submit(id, {{doc, st.judged.size() == 4 ? 0 : 1}});
    if (st.phase != SessionPhase::kSeeding) break;
  }
  // Finish the first active batch partially so exactly 10 are judged.
  while (st.judged.size() < 10) {
    const auto doc = manager_->next_batch(id)[0].doc_id;
    st = manager_->submit(id, {{doc, truth(doc)}});
  }
  ASSERT_EQ(st.judged.size(), 10u);
  const std::string human = manager_->export_qrels(id, ExportMode::kHumanOnly);
  EXPECT_EQ(std::count(human.begin(), human.end(), '\n'), 10);
  const std::string hybrid = manager_->export_qrels(id, ExportMode::kHybrid);
  EXPECT_EQ(std::count(hybrid.begin(), hybrid.end(), '\n'), 200);
  std::istringstream in(hybrid);
  std::string line;
  int human_lines = 0;
  while (std::getline(in, line)) {
    std::istringstream fields(line);
    std::string t, iter, doc, label, source;
    fields >> t >> iter >> doc >> label >> source;
    EXPECT_EQ(t, topic());
    human_lines += source == "human";
  }
  EXPECT_GE(human_lines, 10);
  EXPECT_EQ(manager_->export_qrels(id, ExportMode::kHybrid), hybrid);
  EXPECT_THROW_CODE(parse_export_mode("machine"), ErrorCode::kValidation);
}

TEST_F(SessionTest, BudgetInvariantThroughout) {
  const auto id = create(120).session_id;
  SessionState st = manager_->get(id);
  check_budget_invariant(st);
  while (st.phase == SessionPhase::kSeeding || st.phase == SessionPhase::kActive) {
    const auto batch = manager_->next_batch(id);
    check_budget_invariant(manager_->get(id));
    // Judge in two halves.
    const std::size_t half = (batch.size() + 1) / 2;
    Labels first, second;
    for (std::size_t i = 0; i < batch.size(); ++i) {
      (i < half ? first : second)
          .emplace_back(batch[i].doc_id, truth(batch[i].doc_id));
    }
    st = manager_->submit(id, first);
    check_budget_invariant(st);
    if (!second.empty()) st = manager_->submit(id, second);
    check_budget_invariant(st);
    for (const auto &j : st.judged) {
      EXPECT_EQ(std::count(st.pending_batch.begin(), st.pending_batch.end(),
                           j.doc_id),
                0);
    }
  }
  EXPECT_EQ(st.phase, SessionPhase::kExhausted);
  EXPECT_EQ(st.judged.size(), 120u);
}

TEST_F(SessionTest, StateJson) {
  const auto id = create().session_id;
  drive(id, 3);
  const auto j = nlohmann::json::parse(session_state_to_json(manager_->get(id)));
  EXPECT_EQ(j.at("session_id"), id);
  EXPECT_EQ(j.at("counts").at("judged"), 3);
  const auto &gain = j.at("gain_curve");
  ASSERT_EQ(gain.size(), 3u);
  int rel = 0;
  const auto st = manager_->get(id);
  for (int i = 0; i < 3; ++i) {
    rel += st.judged[i].label;
    EXPECT_EQ(gain[i][0], i + 1);
    EXPECT_EQ(gain[i][1], rel);
  }
}

TEST_F(SessionTest, ConcurrentSubmitsAreSerialized) {
  const auto id = create().session_id;
  SessionState st = manager_->get(id);
  while (st.phase == SessionPhase::kSeeding) st = drive(id, 1);
  const auto batch = manager_->next_batch(id);
  std::vector<std::thread> threads;
  std::atomic<int> ok{0};
  for (const auto &item : batch) {
    threads.emplace_back([&, doc = item.doc_id] {
      try {
        manager_->submit(id, {{doc, truth(doc)}});
        ++ok;
      } catch (const Error &) {
      }
    });
  }
  for (auto &t : threads) t.join();
  EXPECT_EQ(ok.load(), static_cast<int>(batch.size()));
  st = manager_->get(id);
  check_budget_invariant(st);
  EXPECT_EQ(st.judged.size(), st.served_batches.size() - 1 + batch.size());
}

TEST_F(SessionTest, RecoverFromLog) {
  TempDir dir;
  SessionOptions options;
  options.state_dir = dir.path();
  options.snapshot_every = 3;
  manager_ = make_manager(options);
  const auto id = create(150, "tok").session_id;
  SessionState st = manager_->get(id);
  while (st.phase == SessionPhase::kSeeding) st = drive(id, 1);
  drive(id, 3);
  manager_->next_batch(id);  // served but unjudged
  const SessionState before = manager_->get(id);
  const std::string hybrid = manager_->export_qrels(id, ExportMode::kHybrid);
  EXPECT_TRUE(std::filesystem::exists(dir.path() / (id + ".log")));
  EXPECT_TRUE(std::filesystem::exists(dir.path() / (id + ".json")));

  auto fresh = make_manager(options);
  EXPECT_EQ(fresh->recover(), 1u);
  const SessionState after = fresh->get(id);
  EXPECT_EQ(session_state_to_json(after), session_state_to_json(before));
  EXPECT_EQ(fresh->export_qrels(id, ExportMode::kHybrid), hybrid);
  CreateRequest req;
  req.topic_id = topic();
  req.client_token = "tok";
  EXPECT_EQ(fresh->create(req).session_id, id);
  req.client_token = "new";
  EXPECT_NE(fresh->create(req).session_id, id);
}

TEST(SessionNames, RoundTrip) {
  for (auto p : {SessionPhase::kSeeding, SessionPhase::kActive,
                 SessionPhase::kExhausted, SessionPhase::kDiscarded}) {
    EXPECT_EQ(parse_session_phase(session_phase_name(p)), p);
  }
  EXPECT_EQ(parse_export_mode("human_only"), ExportMode::kHumanOnly);
  EXPECT_EQ(parse_export_mode("hybrid"), ExportMode::kHybrid);
}

TEST(Registration, FiltersBaselineToPool) {
  SystemRun run;
  run.system_id = "base";
  run.rankings["t"] = {{"x", 5}, {"b", 4}, {"a", 3}, {"y", 2}};
  const auto reg = make_registration("t", {"b", "a", "c", "a"}, run);
  EXPECT_EQ(reg.pool, (std::vector<std::string>{"a", "b", "c"}));
  EXPECT_EQ(reg.baseline, (std::vector<std::string>{"b", "a"}));
  EXPECT_EQ(reg.baseline_system, "base");
  EXPECT_THROW_CODE(make_registration("t", {}, run), ErrorCode::kInvalidConfig);
  EXPECT_THROW_CODE(make_registration("u", {"a"}, run), ErrorCode::kNotFound);
}

}  // namespace
}  // namespace poolforge
