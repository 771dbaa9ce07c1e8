#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include "poolforge/corpus.h"
#include "poolforge/model.h"
#include "poolforge/simulate.h"

namespace poolforge {

enum class SessionPhase { kSeeding, kActive, kExhausted, kDiscarded };

std::string_view session_phase_name(SessionPhase phase);
SessionPhase parse_session_phase(std::string_view name);

// A topic open for live judging: the documents that may be judged and the
// baseline ranking the seed walk follows. The ranking is restricted to the
// pool, so every document shown costs one judgment.
struct TopicRegistration {
  std::string topic_id;
  std::vector<std::string> pool;
  std::vector<std::string> baseline;
  std::string baseline_system;
};

TopicRegistration make_registration(std::string topic_id,
                                    std::vector<std::string> pool,
                                    const SystemRun &baseline);

struct JudgmentRecord {
  std::string doc_id;
  int label = 0;
  std::int64_t timestamp_ms = 0;
  JudgmentSource source = JudgmentSource::kHuman;
};

struct SessionState {
  std::string session_id;
  std::string topic_id;
  std::string client_token;
  SessionPhase phase = SessionPhase::kSeeding;
  std::vector<JudgmentRecord> judged;
  std::vector<std::string> pending_batch;
  bool pending_served = false;
  std::optional<LogisticModel> model_checkpoint;
  std::int64_t initial_budget = 0;
  // Documents count against the budget when they are served, so
  // budget_remaining + |judged| + |served pending| == initial_budget.
  std::int64_t budget_remaining = 0;
  SimulationConfig config;
  std::int64_t pool_size = 0;
  int batch_size = 0;
  std::int64_t version = 0;
  std::int64_t created_ms = 0;
  std::vector<std::vector<std::string>> served_batches;

  std::int64_t count(int label) const;
};

// Summary plus gain curve ([judgments, relevant found] pairs).
std::string session_state_to_json(const SessionState &state);

struct BatchItem {
  std::string doc_id;
  std::string text;
};

struct CreateRequest {
  std::string topic_id;
  std::string client_token;  // same (topic, token) returns the same session
  SimulationConfig config;   // budget unset means the pool size
};

enum class ExportMode { kHumanOnly, kHybrid };

std::string_view export_mode_name(ExportMode mode);
ExportMode parse_export_mode(std::string_view name);

struct SessionOptions {
  std::filesystem::path state_dir;  // empty: in-memory only
  int snapshot_every = 10;          // events between JSON snapshots
  std::function<std::int64_t()> clock;  // ms since epoch; default system
};

// Live active-learning sessions with a human as the oracle. Seeding walks the
// baseline ranking one document at a time; once a relevant and a
// non-relevant document are found, batches come from the same TopicLearner
// the simulator uses.
//
// Every mutation is appended to <state_dir>/<session>.log before it is
// applied; recover() replays those logs.
class SessionManager {
 public:
  SessionManager(const VectorStore &vectors,
                 std::map<std::string, std::string, std::less<>> texts,
                 SessionOptions options = {});
  ~SessionManager();

  SessionManager(const SessionManager &) = delete;
  SessionManager &operator=(const SessionManager &) = delete;

  void register_topic(TopicRegistration topic);
  std::vector<TopicRegistration> topics() const;

  SessionState create(const CreateRequest &request);
  SessionState get(std::string_view session_id) const;
  std::vector<BatchItem> next_batch(std::string_view session_id);
  SessionState submit(std::string_view session_id,
                      const std::vector<std::pair<std::string, int>> &labels,
                      std::optional<std::int64_t> expected_version = {});
  // Five-column qrels: topic 0 doc label source.
  std::string export_qrels(std::string_view session_id, ExportMode mode) const;

  // Rebuilds every session found in state_dir. Returns how many.
  std::size_t recover();

 private:
  struct Session;

  std::shared_ptr<Session> find(std::string_view session_id) const;
  const TopicRegistration &topic(std::string_view topic_id) const;
  std::int64_t now() const;
  void log_event(Session &s, const std::string &line);
  void maybe_snapshot(Session &s);

  void apply_create(Session &s);
  std::vector<std::string> apply_serve(Session &s);
  void apply_judgments(Session &s,
                       const std::vector<std::pair<std::string, int>> &labels,
                       std::int64_t timestamp);
  void advance(Session &s);

  const VectorStore &vectors_;
  std::map<std::string, std::string, std::less<>> texts_;
  SessionOptions options_;

  mutable std::shared_mutex mu_;
  std::map<std::string, TopicRegistration, std::less<>> topics_;
  std::map<std::string, std::shared_ptr<Session>, std::less<>> sessions_;
  std::map<std::pair<std::string, std::string>, std::string> by_token_;
  std::int64_t next_id_ = 1;
};

}  // namespace poolforge
