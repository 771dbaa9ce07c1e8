#include "poolforge/session.h"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "poolforge/error.h"
#include "poolforge/io.h"

namespace poolforge {

namespace {

using json = nlohmann::json;

constexpr std::string_view kIdPrefix = "session-";

void check_open(const SessionState &st) {
  if (st.phase == SessionPhase::kExhausted ||
      st.phase == SessionPhase::kDiscarded) {
    throw Error(ErrorCode::kConflict,
                "session " + st.session_id + " is " +
                    std::string(session_phase_name(st.phase)));
  }
}

void check_judgments(const SessionState &st, const TopicLearner &learner,
                     const std::vector<std::pair<std::string, int>> &labels) {
  check_open(st);
  if (labels.empty()) {
    throw Error(ErrorCode::kValidation, "no judgments submitted");
  }
  std::set<std::string> seen;
  for (const auto &[doc, label] : labels) {
    if (label != 0 && label != 1) {
      throw Error(ErrorCode::kValidation,
                  "label for " + doc + " must be 0 or 1");
    }
    if (!seen.insert(doc).second) {
      throw Error(ErrorCode::kValidation, "duplicate judgment for " + doc);
    }
    if (std::find(st.pending_batch.begin(), st.pending_batch.end(), doc) ==
        st.pending_batch.end()) {
      throw Error(ErrorCode::kValidation,
                  learner.judged().contains(doc)
                      ? "document already judged: " + doc
                      : "document not pending: " + doc);
    }
  }
}

std::int64_t system_now_ms() {
  using namespace std::chrono;
  return duration_cast<milliseconds>(system_clock::now().time_since_epoch())
      .count();
}

}  // namespace

std::string_view session_phase_name(SessionPhase phase) {
  switch (phase) {
    case SessionPhase::kSeeding:
      return "seeding";
    case SessionPhase::kActive:
      return "active";
    case SessionPhase::kExhausted:
      return "exhausted";
    case SessionPhase::kDiscarded:
      return "discarded";
  }
  return "seeding";
}

SessionPhase parse_session_phase(std::string_view name) {
  for (auto p : {SessionPhase::kSeeding, SessionPhase::kActive,
                 SessionPhase::kExhausted, SessionPhase::kDiscarded}) {
    if (session_phase_name(p) == name) return p;
  }
  throw Error(ErrorCode::kParse, "unknown phase '" + std::string(name) + "'");
}

std::string_view export_mode_name(ExportMode mode) {
  return mode == ExportMode::kHumanOnly ? "human_only" : "hybrid";
}

ExportMode parse_export_mode(std::string_view name) {
  if (name == "human_only") return ExportMode::kHumanOnly;
  if (name == "hybrid") return ExportMode::kHybrid;
  throw Error(ErrorCode::kValidation,
              "mode must be human_only or hybrid, got '" + std::string(name) +
                  "'");
}

TopicRegistration make_registration(std::string topic_id,
                                    std::vector<std::string> pool,
                                    const SystemRun &baseline) {
  TopicRegistration reg;
  reg.topic_id = std::move(topic_id);
  std::sort(pool.begin(), pool.end());
  pool.erase(std::unique(pool.begin(), pool.end()), pool.end());
  if (pool.empty()) {
    throw Error(ErrorCode::kInvalidConfig,
                "topic " + reg.topic_id + " has an empty pool");
  }
  reg.pool = std::move(pool);
  reg.baseline_system = baseline.system_id;
  const auto *ranking = baseline.ranking(reg.topic_id);
  if (!ranking) {
    throw Error(ErrorCode::kNotFound, "run " + baseline.system_id +
                                          " has no ranking for topic " +
                                          reg.topic_id);
  }
  for (const auto &r : *ranking) {
    if (std::binary_search(reg.pool.begin(), reg.pool.end(), r.doc_id)) {
      reg.baseline.push_back(r.doc_id);
    }
  }
  return reg;
}

std::int64_t SessionState::count(int label) const {
  return std::count_if(judged.begin(), judged.end(),
                       [&](const JudgmentRecord &j) { return j.label == label; });
}

std::string session_state_to_json(const SessionState &s) {
  json judged = json::array();
  json gain = json::array();
  std::int64_t rel = 0;
  for (std::size_t i = 0; i < s.judged.size(); ++i) {
    const auto &j = s.judged[i];
    judged.push_back({{"doc_id", j.doc_id},
                      {"label", j.label},
                      {"timestamp_ms", j.timestamp_ms},
                      {"source", judgment_source_name(j.source)}});
    rel += j.label;
    gain.push_back({static_cast<std::int64_t>(i + 1), rel});
  }
  json out{
      {"session_id", s.session_id},
      {"topic_id", s.topic_id},
      {"client_token", s.client_token},
      {"phase", session_phase_name(s.phase)},
      {"budget_remaining", s.budget_remaining},
      {"initial_budget", s.initial_budget},
      {"pool_size", s.pool_size},
      {"batch_size", s.batch_size},
      {"version", s.version},
      {"created_ms", s.created_ms},
      {"pending_batch", s.pending_batch},
      {"pending_served", s.pending_served},
      {"counts",
       {{"judged", s.judged.size()},
        {"relevant", rel},
        {"nonrelevant", static_cast<std::int64_t>(s.judged.size()) - rel},
        {"pending", s.pending_batch.size()}}},
      {"judged", std::move(judged)},
      {"gain_curve", std::move(gain)},
      {"served_batches", s.served_batches},
      {"config", json::parse(simulation_config_to_json(s.config))},
      {"model_checkpoint", s.model_checkpoint
                               ? json::parse(model_to_json(*s.model_checkpoint))
                               : json(nullptr)}};
  return out.dump();
}

struct SessionManager::Session {
  std::mutex mu;
  SessionState state;
  const TopicRegistration *topic = nullptr;
  std::unique_ptr<TopicLearner> learner;
  std::size_t walk_pos = 0;
  std::ofstream log;
  int since_snapshot = 0;
};

SessionManager::SessionManager(
    const VectorStore &vectors,
    std::map<std::string, std::string, std::less<>> texts,
    SessionOptions options)
    : vectors_(vectors), texts_(std::move(texts)), options_(std::move(options)) {
  if (options_.snapshot_every < 1) {
    throw Error(ErrorCode::kInvalidConfig, "snapshot_every must be >= 1");
  }
  if (!options_.state_dir.empty()) {
    std::filesystem::create_directories(options_.state_dir);
  }
}

SessionManager::~SessionManager() = default;

std::int64_t SessionManager::now() const {
  return options_.clock ? options_.clock() : system_now_ms();
}

void SessionManager::register_topic(TopicRegistration topic) {
  if (topic.pool.empty()) {
    throw Error(ErrorCode::kInvalidConfig,
                "topic " + topic.topic_id + " has an empty pool");
  }
  for (const auto &doc : topic.pool) {
    if (!vectors_.find(doc)) {
      throw Error(ErrorCode::kNotFound, "no vector for pool document " + doc);
    }
  }
  std::unique_lock lock(mu_);
  if (topics_.contains(topic.topic_id)) {
    throw Error(ErrorCode::kConflict,
                "topic " + topic.topic_id + " already registered");
  }
  std::string id = topic.topic_id;
  topics_.emplace(std::move(id), std::move(topic));
}

std::vector<TopicRegistration> SessionManager::topics() const {
  std::shared_lock lock(mu_);
  std::vector<TopicRegistration> out;
  for (const auto &[id, t] : topics_) out.push_back(t);
  return out;
}

const TopicRegistration &SessionManager::topic(std::string_view topic_id) const {
  auto it = topics_.find(topic_id);
  if (it == topics_.end()) {
    throw Error(ErrorCode::kNotFound,
                "unknown topic " + std::string(topic_id));
  }
  return it->second;
}

std::shared_ptr<SessionManager::Session> SessionManager::find(
    std::string_view session_id) const {
  std::shared_lock lock(mu_);
  auto it = sessions_.find(session_id);
  if (it == sessions_.end()) {
    throw Error(ErrorCode::kNotFound,
                "unknown session " + std::string(session_id));
  }
  return it->second;
}

void SessionManager::log_event(Session &s, const std::string &line) {
  if (options_.state_dir.empty()) return;
  if (!s.log.is_open()) {
    const auto path = options_.state_dir / (s.state.session_id + ".log");
    s.log.open(path, std::ios::app);
    if (!s.log) {
      throw Error(ErrorCode::kIo, "cannot open " + path.string());
    }
  }
  s.log << line << '\n';
  s.log.flush();
  if (!s.log) throw Error(ErrorCode::kIo, "write to session log failed");
  if (++s.since_snapshot >= options_.snapshot_every) maybe_snapshot(s);
}

void SessionManager::maybe_snapshot(Session &s) {
  s.since_snapshot = 0;
  SessionState copy = s.state;
  if (s.learner->has_model()) copy.model_checkpoint = s.learner->model();
  atomic_write_file(options_.state_dir / (s.state.session_id + ".json"),
                    session_state_to_json(copy) + "\n");
}

// ---- state transitions ------------------------------------------------------
// None of these log; the public entry points and recover() call them.

void SessionManager::apply_create(Session &s) {
  const auto &cfg = s.state.config;
  const auto &reg = *s.topic;
  s.learner = std::make_unique<TopicLearner>(reg.topic_id, reg.pool, vectors_,
                                             cfg.strategy, cfg.train,
                                             cfg.rng_seed);
  s.state.topic_id = reg.topic_id;
  s.state.pool_size = static_cast<std::int64_t>(reg.pool.size());
  s.state.batch_size = batch_size_for(cfg.batch_fraction, reg.pool.size());
  s.state.initial_budget = cfg.budget.value_or(s.state.pool_size);
  s.state.budget_remaining = s.state.initial_budget;
  s.state.phase = SessionPhase::kSeeding;
  s.state.version = 1;
  advance(s);
}

void SessionManager::advance(Session &s) {
  auto &st = s.state;
  if (!st.pending_batch.empty()) return;
  const auto &seed = st.config.seed;
  if (st.phase == SessionPhase::kSeeding) {
    const auto rel = static_cast<int>(st.count(1));
    const auto nonrel = static_cast<int>(st.count(0));
    if (rds_goal_met(seed, rel, nonrel)) {
      st.phase = SessionPhase::kActive;
    } else if (rel + nonrel >= seed.rds_max_effort) {
      st.phase = SessionPhase::kDiscarded;
      return;
    } else if (st.budget_remaining == 0) {
      st.phase = SessionPhase::kExhausted;
      return;
    } else {
      const auto &walk = s.topic->baseline;
      while (s.walk_pos < walk.size() &&
             !s.learner->unlabeled().contains(walk[s.walk_pos])) {
        ++s.walk_pos;
      }
      if (s.walk_pos == walk.size()) {
        st.phase = SessionPhase::kDiscarded;
        return;
      }
      st.pending_batch = {walk[s.walk_pos++]};
      st.pending_served = false;
      return;
    }
  }
  if (st.phase != SessionPhase::kActive) return;
  const auto unlabeled =
      static_cast<std::int64_t>(s.learner->unlabeled().size());
  const std::int64_t k =
      std::min({static_cast<std::int64_t>(st.batch_size), st.budget_remaining,
                unlabeled});
  if (k <= 0) {
    st.phase = SessionPhase::kExhausted;
    return;
  }
  st.pending_batch = s.learner->select(static_cast<int>(k));
  st.pending_served = false;
}

std::vector<std::string> SessionManager::apply_serve(Session &s) {
  auto &st = s.state;
  check_open(st);
  if (!st.pending_served) {
    st.pending_served = true;
    st.budget_remaining -= static_cast<std::int64_t>(st.pending_batch.size());
    st.served_batches.push_back(st.pending_batch);
    ++st.version;
  }
  return st.pending_batch;
}

void SessionManager::apply_judgments(
    Session &s, const std::vector<std::pair<std::string, int>> &labels,
    std::int64_t timestamp) {
  auto &st = s.state;
  check_judgments(st, *s.learner, labels);
  for (const auto &[doc, label] : labels) {
    s.learner->record(doc, label);
    st.judged.push_back({doc, label, timestamp, JudgmentSource::kHuman});
    st.pending_batch.erase(
        std::find(st.pending_batch.begin(), st.pending_batch.end(), doc));
  }
  s.learner->retrain();
  ++st.version;
  if (st.pending_batch.empty()) {
    st.pending_served = false;
    advance(s);
  }
}

// ---- public API -------------------------------------------------------------

SessionState SessionManager::create(const CreateRequest &request) {
  request.config.validate();
  std::shared_ptr<Session> s;
  {
    std::unique_lock lock(mu_);
    const TopicRegistration &reg = topic(request.topic_id);
    if (!request.client_token.empty()) {
      auto it = by_token_.find({request.topic_id, request.client_token});
      if (it != by_token_.end()) {
        lock.unlock();
        return get(it->second);
      }
    }
    s = std::make_shared<Session>();
    s->topic = &reg;
    s->state.session_id = std::string(kIdPrefix) + std::to_string(next_id_++);
    s->state.client_token = request.client_token;
    s->state.config = request.config;
    s->state.config.seed.kind = SeedKind::kRDS;
    s->state.config.rds_system = reg.baseline_system;
    s->state.created_ms = now();
    apply_create(*s);
    sessions_.emplace(s->state.session_id, s);
    if (!request.client_token.empty()) {
      by_token_[{request.topic_id, request.client_token}] =
          s->state.session_id;
    }
  }
  std::lock_guard guard(s->mu);
  json event{{"type", "create"},
             {"session_id", s->state.session_id},
             {"topic_id", s->state.topic_id},
             {"client_token", s->state.client_token},
             {"config", json::parse(simulation_config_to_json(s->state.config))},
             {"ts", s->state.created_ms}};
  log_event(*s, event.dump());
  SessionState out = s->state;
  if (s->learner->has_model()) out.model_checkpoint = s->learner->model();
  return out;
}

SessionState SessionManager::get(std::string_view session_id) const {
  auto s = find(session_id);
  std::lock_guard guard(s->mu);
  SessionState out = s->state;
  if (s->learner->has_model()) out.model_checkpoint = s->learner->model();
  return out;
}

std::vector<BatchItem> SessionManager::next_batch(std::string_view session_id) {
  auto s = find(session_id);
  std::lock_guard guard(s->mu);
  const bool fresh = !s->state.pending_served;
  const auto docs = apply_serve(*s);
  if (fresh) {
    json event{{"type", "serve"}, {"docs", docs}, {"ts", now()}};
    log_event(*s, event.dump());
  }
  std::vector<BatchItem> out;
  for (const auto &doc : docs) {
    auto it = texts_.find(doc);
    out.push_back({doc, it == texts_.end() ? std::string() : it->second});
  }
  return out;
}

SessionState SessionManager::submit(
    std::string_view session_id,
    const std::vector<std::pair<std::string, int>> &labels,
    std::optional<std::int64_t> expected_version) {
  auto s = find(session_id);
  std::lock_guard guard(s->mu);
  if (expected_version && *expected_version != s->state.version) {
    throw Error(ErrorCode::kConflict,
                "version mismatch: expected " +
                    std::to_string(*expected_version) + ", session is at " +
                    std::to_string(s->state.version));
  }
  const std::int64_t ts = now();
  check_judgments(s->state, *s->learner, labels);
  // Judging a document that was never fetched still spends the budget.
  if (!s->state.pending_served) {
    const auto docs = apply_serve(*s);
    json event{{"type", "serve"}, {"docs", docs}, {"ts", ts}};
    log_event(*s, event.dump());
  }
  apply_judgments(*s, labels, ts);
  json items = json::array();
  for (const auto &[doc, label] : labels) items.push_back({doc, label});
  json event{{"type", "judgments"}, {"labels", items}, {"ts", ts}};
  log_event(*s, event.dump());
  SessionState out = s->state;
  if (s->learner->has_model()) out.model_checkpoint = s->learner->model();
  return out;
}

std::string SessionManager::export_qrels(std::string_view session_id,
                                         ExportMode mode) const {
  auto s = find(session_id);
  std::lock_guard guard(s->mu);
  const auto &st = s->state;
  Qrels q;
  if (mode == ExportMode::kHumanOnly) {
    if (st.judged.empty()) {
      throw Error(ErrorCode::kConflict,
                  "session " + st.session_id + " has no judgments");
    }
    for (const auto &j : st.judged) q.set(st.topic_id, j.doc_id, j.label);
  } else {
    if (!s->learner->has_model()) {
      throw Error(ErrorCode::kConflict,
                  "session " + st.session_id + " has no trained model");
    }
    const LabelMap labels = s->learner->hybrid();
    for (const auto &[doc, label] : labels) {
      q.set(st.topic_id, doc, label,
            s->learner->judged().contains(doc) ? JudgmentSource::kHuman
                                               : JudgmentSource::kMachine);
    }
  }
  std::ostringstream out;
  write_qrels(out, q, QrelsFormat::kWithSource);
  return out.str();
}

std::size_t SessionManager::recover() {
  if (options_.state_dir.empty()) return 0;
  std::vector<std::filesystem::path> logs;
  for (const auto &entry :
       std::filesystem::directory_iterator(options_.state_dir)) {
    if (entry.path().extension() == ".log") logs.push_back(entry.path());
  }
  std::sort(logs.begin(), logs.end());

  std::size_t recovered = 0;
  for (const auto &path : logs) {
    std::istringstream in(read_file(path));
    auto s = std::make_shared<Session>();
    std::string line;
    std::size_t lineno = 0;
    bool created = false;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty()) continue;
      json ev;
      try {
        ev = json::parse(line);
        const std::string type = ev.at("type").get<std::string>();
        if (type == "create") {
          if (created) throw Error(ErrorCode::kParse, "second create event");
          std::shared_lock lock(mu_);
          s->topic = &topic(ev.at("topic_id").get<std::string>());
          lock.unlock();
          s->state.session_id = ev.at("session_id").get<std::string>();
          s->state.client_token = ev.at("client_token").get<std::string>();
          s->state.config =
              simulation_config_from_json(ev.at("config").dump());
          s->state.created_ms = ev.at("ts").get<std::int64_t>();
          apply_create(*s);
          created = true;
        } else if (!created) {
          throw Error(ErrorCode::kParse, "event before create");
        } else if (type == "serve") {
          const auto docs = apply_serve(*s);
          if (docs != ev.at("docs").get<std::vector<std::string>>()) {
            throw Error(ErrorCode::kParse,
                        "replayed batch differs from the logged one");
          }
        } else if (type == "judgments") {
          std::vector<std::pair<std::string, int>> labels;
          for (const auto &item : ev.at("labels")) {
            labels.emplace_back(item.at(0).get<std::string>(),
                                item.at(1).get<int>());
          }
          apply_judgments(*s, labels, ev.at("ts").get<std::int64_t>());
        } else {
          throw Error(ErrorCode::kParse, "unknown event type " + type);
        }
      } catch (const json::exception &e) {
        throw Error(ErrorCode::kParse, path.string() + ":" +
                                           std::to_string(lineno) + ": " +
                                           e.what());
      } catch (const Error &e) {
        throw Error(e.code(), path.string() + ":" + std::to_string(lineno) +
                                  ": " + e.what());
      }
    }
    if (!created) continue;
    std::unique_lock lock(mu_);
    const std::string id = s->state.session_id;
    if (sessions_.contains(id)) continue;
    if (id.rfind(kIdPrefix, 0) == 0) {
      try {
        next_id_ = std::max<std::int64_t>(
            next_id_, std::stoll(id.substr(kIdPrefix.size())) + 1);
      } catch (const std::exception &) {
      }
    }
    if (!s->state.client_token.empty()) {
      by_token_[{s->state.topic_id, s->state.client_token}] = id;
    }
    sessions_.emplace(id, std::move(s));
    ++recovered;
  }
  return recovered;
}

}  // namespace poolforge
