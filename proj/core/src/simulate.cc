#include "poolforge/simulate.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "poolforge/error.h"
#include "poolforge/io.h"
#include "poolforge/rng.h"

namespace poolforge {

namespace {

using json = nlohmann::json;

constexpr double kCostEps = 1e-9;

std::int64_t cost_target(double fraction, std::size_t pool_size) {
  return static_cast<std::int64_t>(
      std::floor(fraction * static_cast<double>(pool_size) + kCostEps));
}

}  // namespace

std::vector<double> default_cost_points() {
  std::vector<double> pts;
  for (int i = 0; i <= 10; ++i) pts.push_back(i / 10.0);
  return pts;
}

std::vector<double> default_betas() { return {0.25, 0.5, 1.0, 3.0, 5.0}; }

void SimulationConfig::validate() const {
  seed.validate();
  train.validate();
  if (!(batch_fraction > 0.0 && batch_fraction <= 1.0)) {
    throw Error(ErrorCode::kInvalidConfig, "batch_fraction must be in (0, 1]");
  }
  if (cost_points.size() < 2) {
    throw Error(ErrorCode::kInvalidConfig, "need at least two cost points");
  }
  for (std::size_t i = 0; i < cost_points.size(); ++i) {
    if (!(cost_points[i] >= 0.0 && cost_points[i] <= 1.0)) {
      throw Error(ErrorCode::kInvalidConfig, "cost points must lie in [0, 1]");
    }
    if (i > 0 && !(cost_points[i] > cost_points[i - 1])) {
      throw Error(ErrorCode::kInvalidConfig,
                  "cost points must be strictly ascending");
    }
  }
  if (budget && *budget < 0) {
    throw Error(ErrorCode::kInvalidConfig, "budget must be >= 0");
  }
  if (betas.empty()) {
    throw Error(ErrorCode::kInvalidConfig, "need at least one beta");
  }
  for (double b : betas) {
    if (!(b > 0.0) || !std::isfinite(b)) {
      throw Error(ErrorCode::kInvalidConfig, "betas must be > 0");
    }
  }
}

namespace {

[[noreturn]] void bad_key(const std::string &where, const std::string &key) {
  throw Error(ErrorCode::kInvalidConfig,
              "unknown key '" + key + "' in " + where);
}

template <typename T>
T get_as(const json &j, const std::string &key) {
  try {
    return j.get<T>();
  } catch (const json::exception &) {
    throw Error(ErrorCode::kInvalidConfig, "bad value for '" + key + "'");
  }
}

}  // namespace

std::string simulation_config_to_json(const SimulationConfig &cfg) {
  json j{{"strategy", strategy_name(cfg.strategy)},
         {"seed",
          {{"kind", seed_kind_name(cfg.seed.kind)},
           {"is_rel", cfg.seed.is_rel},
           {"is_nonrel", cfg.seed.is_nonrel},
           {"rds_min_rel", cfg.seed.rds_min_rel},
           {"rds_min_nonrel", cfg.seed.rds_min_nonrel},
           {"rds_max_effort", cfg.seed.rds_max_effort}}},
         {"train", json::parse(train_config_to_json(cfg.train))},
         {"batch_fraction", cfg.batch_fraction},
         {"cost_points", cfg.cost_points},
         {"budget", cfg.budget ? json(*cfg.budget) : json(nullptr)},
         {"rng_seed", cfg.rng_seed},
         {"betas", cfg.betas},
         {"rds_system", cfg.rds_system}};
  return j.dump();
}

SimulationConfig simulation_config_from_json(std::string_view text,
                                             const SimulationConfig &base) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception &e) {
    throw Error(ErrorCode::kParse, std::string("bad simulation config: ") +
                                       e.what());
  }
  if (!j.is_object()) {
    throw Error(ErrorCode::kInvalidConfig, "simulation config must be an object");
  }
  SimulationConfig cfg = base;
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string &key = it.key();
    const json &v = it.value();
    if (key == "strategy") {
      cfg.strategy = parse_strategy(get_as<std::string>(v, key));
    } else if (key == "seed") {
      if (!v.is_object()) bad_key("simulation", key);
      for (auto s = v.begin(); s != v.end(); ++s) {
        const std::string &k = s.key();
        if (k == "kind") {
          cfg.seed.kind = parse_seed_kind(get_as<std::string>(s.value(), k));
        } else if (k == "is_rel") {
          cfg.seed.is_rel = get_as<int>(s.value(), k);
        } else if (k == "is_nonrel") {
          cfg.seed.is_nonrel = get_as<int>(s.value(), k);
        } else if (k == "rds_min_rel") {
          cfg.seed.rds_min_rel = get_as<int>(s.value(), k);
        } else if (k == "rds_min_nonrel") {
          cfg.seed.rds_min_nonrel = get_as<int>(s.value(), k);
        } else if (k == "rds_max_effort") {
          cfg.seed.rds_max_effort = get_as<int>(s.value(), k);
        } else {
          bad_key("simulation.seed", k);
        }
      }
    } else if (key == "train") {
      if (!v.is_object()) bad_key("simulation", key);
      for (auto s = v.begin(); s != v.end(); ++s) {
        const std::string &k = s.key();
        if (k == "l2_lambda") {
          cfg.train.l2_lambda = get_as<double>(s.value(), k);
        } else if (k == "learning_rate") {
          cfg.train.learning_rate = get_as<double>(s.value(), k);
        } else if (k == "max_iters") {
          cfg.train.max_iters = get_as<int>(s.value(), k);
        } else if (k == "grad_tolerance") {
          cfg.train.grad_tolerance = get_as<double>(s.value(), k);
        } else if (k == "oversample") {
          cfg.train.oversample = get_as<bool>(s.value(), k);
        } else {
          bad_key("simulation.train", k);
        }
      }
    } else if (key == "batch_fraction") {
      cfg.batch_fraction = get_as<double>(v, key);
    } else if (key == "cost_points") {
      cfg.cost_points = get_as<std::vector<double>>(v, key);
    } else if (key == "budget") {
      if (v.is_null()) {
        cfg.budget.reset();
      } else {
        cfg.budget = get_as<std::int64_t>(v, key);
      }
    } else if (key == "rng_seed") {
      cfg.rng_seed = get_as<std::uint64_t>(v, key);
    } else if (key == "betas") {
      cfg.betas = get_as<std::vector<double>>(v, key);
    } else if (key == "rds_system") {
      cfg.rds_system = get_as<std::string>(v, key);
    } else {
      bad_key("simulation", key);
    }
  }
  cfg.validate();
  return cfg;
}

int batch_size_for(double batch_fraction, std::size_t pool_size) {
  const double raw = batch_fraction * static_cast<double>(pool_size);
  // 0.1 * 200 must give 20, not 21.
  const auto u = static_cast<std::int64_t>(std::ceil(raw - kCostEps));
  return static_cast<int>(std::max<std::int64_t>(u, 1));
}

LabelMap hybrid_labels(const LabelMap &human, const LogisticModel &model,
                       const std::vector<std::string> &pool,
                       const VectorStore &vectors) {
  LabelMap out;
  for (const auto &doc : pool) {
    if (auto it = human.find(doc); it != human.end()) {
      out.emplace(doc, it->second);
      continue;
    }
    const SparseVector *x = vectors.find(doc);
    if (!x) throw Error(ErrorCode::kNotFound, "no vector for document " + doc);
    out.emplace(doc, predict_proba(model, *x) > 0.5 ? 1 : 0);
  }
  return out;
}

// ---- TopicLearner ----------------------------------------------------------

TopicLearner::TopicLearner(std::string topic, std::vector<std::string> pool,
                           const VectorStore &vectors,
                           SelectionStrategy strategy,
                           TrainConfig train_config, std::uint64_t rng_seed)
    : topic_(std::move(topic)),
      pool_(std::move(pool)),
      vectors_(&vectors),
      strategy_(strategy),
      train_config_(train_config),
      rng_seed_(rng_seed) {
  std::sort(pool_.begin(), pool_.end());
  pool_.erase(std::unique(pool_.begin(), pool_.end()), pool_.end());
  for (const auto &doc : pool_) {
    if (!vectors.find(doc)) {
      throw Error(ErrorCode::kNotFound, "no vector for pool document " + doc);
    }
    unlabeled_.insert(doc);
  }
}

const LogisticModel &TopicLearner::model() const {
  if (!model_) throw Error(ErrorCode::kConflict, "no model trained yet");
  return *model_;
}

bool TopicLearner::is_pool_doc(std::string_view doc_id) const {
  return std::binary_search(pool_.begin(), pool_.end(), doc_id);
}

void TopicLearner::record(const std::string &doc_id, int label) {
  if (label != 0 && label != 1) {
    throw Error(ErrorCode::kValidation, "labels must be 0 or 1");
  }
  if (judged_.contains(doc_id)) {
    throw Error(ErrorCode::kValidation, "document already judged: " + doc_id);
  }
  if (!unlabeled_.erase(doc_id)) {
    throw Error(ErrorCode::kValidation, "document not in pool: " + doc_id);
  }
  judged_.emplace(doc_id, label);
}

bool TopicLearner::retrain() {
  LabeledSet data;
  data.dimension = vectors_->vocabulary.size();
  data.items.reserve(judged_.size());
  for (const auto &[doc, label] : judged_) {
    data.items.push_back({*vectors_->find(doc), label});
  }
  if (data.count(0) == 0 || data.count(1) == 0) return model_.has_value();
  model_ = fit_relevance_model(
      data, train_config_,
      derive_seed(rng_seed_, topic_, "oversample", judged_.size()));
  return true;
}

std::map<std::string, double> TopicLearner::unlabeled_probabilities() const {
  std::map<std::string, double> probs;
  const auto &m = model();
  for (const auto &doc : unlabeled_) {
    probs.emplace(doc, predict_proba(m, *vectors_->find(doc)));
  }
  return probs;
}

std::vector<std::string> TopicLearner::select(int batch) const {
  std::map<std::string, double> probs;
  if (strategy_ != SelectionStrategy::kSPL) probs = unlabeled_probabilities();
  return select_batch(strategy_, probs, unlabeled_, batch,
                      derive_seed(rng_seed_, topic_, "select", judged_.size()));
}

LabelMap TopicLearner::hybrid() const {
  if (unlabeled_.empty()) return judged_;
  return hybrid_labels(judged_, model(), pool_, *vectors_);
}

// ---- Simulation ------------------------------------------------------------

double TopicResult::auc(double beta) const {
  std::vector<double> xs, ys;
  for (const auto &s : snapshots) {
    xs.push_back(s.human_fraction);
    ys.push_back(s.f_beta_scores.at(beta));
  }
  return auc_trapezoid(xs, ys);
}

TopicResult run_topic(std::string_view topic, const Qrels &pool_qrels,
                      const SystemRun *run_for_rds, const VectorStore &vectors,
                      const SimulationConfig &cfg) {
  cfg.validate();
  const auto *judgments = pool_qrels.topic(topic);
  if (!judgments) {
    throw Error(ErrorCode::kNotFound, "unknown topic " + std::string(topic));
  }
  if (cfg.seed.kind == SeedKind::kRDS && !run_for_rds) {
    throw Error(ErrorCode::kInvalidConfig, "RDS seeding requires a run");
  }
  TopicResult result;
  result.topic_id = std::string(topic);
  std::vector<std::string> pool = pool_qrels.pool(topic);
  result.pool_size = static_cast<std::int64_t>(pool.size());
  result.prevalence = pool.empty() ? 0.0
                                   : static_cast<double>(
                                         pool_qrels.num_relevant(topic)) /
                                         static_cast<double>(pool.size());

  SeedConfig seed_cfg = cfg.seed;
  seed_cfg.rng_seed = derive_seed(cfg.rng_seed, topic, "seed_is");
  SeedResult seed = cfg.seed.kind == SeedKind::kIS
                        ? seed_is(pool_qrels, topic, seed_cfg)
                        : seed_rds(*run_for_rds, pool_qrels, topic, seed_cfg);
  result.seed_cost = seed.cost;
  if (seed.discarded) {
    result.discarded = true;
    return result;
  }

  TopicLearner learner(result.topic_id, pool, vectors, cfg.strategy, cfg.train,
                       cfg.rng_seed);
  std::vector<std::pair<std::string, int>> order;
  for (const auto &j : seed.judged) {
    learner.record(j.doc_id, j.label);
    order.emplace_back(j.doc_id, j.label);
    result.batches.push_back({j.doc_id});
  }
  learner.retrain();

  LabelMap truth;
  for (const auto &[doc, j] : *judgments) truth.emplace(doc, j.label);

  struct State {
    std::size_t judged_count;
    LabelMap hybrid;
  };
  std::vector<State> states;
  states.push_back({order.size(), learner.hybrid()});

  std::int64_t budget_left =
      cfg.budget ? *cfg.budget - seed.cost : std::numeric_limits<std::int64_t>::max();
  const int u = batch_size_for(cfg.batch_fraction, pool.size());
  while (!learner.unlabeled().empty()) {
    const int batch =
        static_cast<int>(std::min<std::size_t>(u, learner.unlabeled().size()));
    if (budget_left < batch) break;
    auto picked = learner.select(batch);
    for (const auto &doc : picked) {
      const int label = judgments->at(doc).label;
      learner.record(doc, label);
      order.emplace_back(doc, label);
    }
    // A fully judged pool never consults the model again.
    if (!learner.unlabeled().empty()) learner.retrain();
    budget_left -= batch;
    result.batches.push_back(std::move(picked));
    states.push_back({order.size(), learner.hybrid()});
  }

  for (double c : cfg.cost_points) {
    const std::int64_t target = cost_target(c, pool.size());
    std::size_t pick = 0;
    for (std::size_t i = 0; i < states.size(); ++i) {
      if (static_cast<std::int64_t>(states[i].judged_count) <= target) pick = i;
    }
    const State &st = states[pick];
    CostSnapshot snap;
    snap.human_fraction = c;
    snap.human_count = static_cast<std::int64_t>(st.judged_count);
    snap.human_judged.assign(order.begin(), order.begin() + st.judged_count);
    snap.hybrid_labels = st.hybrid;
    snap.confusion = confusion(st.hybrid, truth);
    for (double b : cfg.betas) snap.f_beta_scores[b] = f_beta(snap.confusion, b);
    result.snapshots.push_back(std::move(snap));
  }
  return result;
}

std::vector<const TopicResult *> CollectionResult::kept_topics() const {
  std::vector<const TopicResult *> out;
  for (const auto &t : topics) {
    if (!t.discarded) out.push_back(&t);
  }
  return out;
}

std::set<std::string> CollectionResult::discarded_topics() const {
  std::set<std::string> out;
  for (const auto &t : topics) {
    if (t.discarded) out.insert(t.topic_id);
  }
  return out;
}

namespace {

std::vector<double> mean_curve(const std::vector<const TopicResult *> &topics,
                               std::size_t num_points, double beta) {
  std::vector<double> curve(num_points, 0.0);
  for (const auto *t : topics) {
    for (std::size_t i = 0; i < num_points; ++i) {
      curve[i] += t->snapshots[i].f_beta_scores.at(beta);
    }
  }
  for (double &v : curve) v /= static_cast<double>(topics.size());
  return curve;
}

}  // namespace

const SystemRun &choose_rds_run(const SimulationConfig &cfg,
                                const std::vector<SystemRun> &runs) {
  if (runs.empty()) {
    throw Error(ErrorCode::kInvalidConfig, "RDS seeding requires runs");
  }
  if (!cfg.rds_system.empty()) {
    for (const auto &r : runs) {
      if (r.system_id == cfg.rds_system) return r;
    }
    throw Error(ErrorCode::kInvalidConfig, "no run named " + cfg.rds_system);
  }
  std::vector<const SystemRun *> sorted;
  for (const auto &r : runs) sorted.push_back(&r);
  std::sort(sorted.begin(), sorted.end(),
            [](auto *a, auto *b) { return a->system_id < b->system_id; });
  Rng rng(derive_seed(cfg.rng_seed, "", "rds_run"));
  return *sorted[rng.uniform_index(sorted.size())];
}

CollectionResult run_collection(const std::vector<std::string> &topics,
                                const Qrels &qrels, const VectorStore &vectors,
                                const SimulationConfig &cfg,
                                const std::vector<SystemRun> &runs,
                                int threads) {
  cfg.validate();
  const SystemRun *rds_run = cfg.seed.kind == SeedKind::kRDS
                                 ? &choose_rds_run(cfg, runs)
                                 : nullptr;

  std::vector<std::string> ordered = topics;
  std::sort(ordered.begin(), ordered.end());
  ordered.erase(std::unique(ordered.begin(), ordered.end()), ordered.end());

  CollectionResult out;
  out.strategy = cfg.strategy;
  out.seed_kind = cfg.seed.kind;
  out.oversample = cfg.train.oversample;
  out.cost_points = cfg.cost_points;
  out.betas = cfg.betas;
  out.topics.resize(ordered.size());

  std::vector<std::exception_ptr> errors(ordered.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < ordered.size(); i = next++) {
      try {
        out.topics[i] = run_topic(ordered[i], qrels, rds_run, vectors, cfg);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int n_threads = std::max(1, std::min<int>(threads, ordered.size()));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto &th : pool) th.join();
  }
  for (auto &e : errors) {
    if (e) std::rethrow_exception(e);
  }

  auto kept = out.kept_topics();
  if (kept.empty()) {
    throw Error(ErrorCode::kEmptyResult, "every topic was discarded");
  }
  for (double b : cfg.betas) {
    out.average_curves[b] = mean_curve(kept, cfg.cost_points.size(), b);
    out.average_auc[b] = auc_trapezoid(cfg.cost_points, out.average_curves[b]);
  }
  return out;
}

std::vector<PrevalenceBin> bin_by_prevalence(const CollectionResult &result,
                                             int num_bins, double beta) {
  if (num_bins < 1) {
    throw Error(ErrorCode::kInvalidConfig, "need at least one bin");
  }
  auto kept = result.kept_topics();
  if (kept.empty()) {
    throw Error(ErrorCode::kEmptyResult, "no topics to bin");
  }
  double lo = kept.front()->prevalence, hi = lo;
  for (const auto *t : kept) {
    lo = std::min(lo, t->prevalence);
    hi = std::max(hi, t->prevalence);
  }
  const int bins = hi > lo ? num_bins : 1;
  const double width = bins > 1 ? (hi - lo) / bins : 0.0;
  std::vector<std::vector<const TopicResult *>> members(bins);
  for (const auto *t : kept) {
    int b = width > 0.0 ? static_cast<int>((t->prevalence - lo) / width) : 0;
    members[std::clamp(b, 0, bins - 1)].push_back(t);
  }
  std::vector<PrevalenceBin> out;
  for (int b = 0; b < bins; ++b) {
    if (members[b].empty()) continue;
    PrevalenceBin bin;
    bin.low = lo + b * width;
    bin.high = bins > 1 ? lo + (b + 1) * width : hi;
    for (const auto *t : members[b]) bin.topics.push_back(t->topic_id);
    bin.curve = mean_curve(members[b], result.cost_points.size(), beta);
    bin.auc = auc_trapezoid(result.cost_points, bin.curve);
    out.push_back(std::move(bin));
  }
  return out;
}

// ---- CSV -------------------------------------------------------------------

std::string curves_csv(const std::vector<CollectionResult> &results) {
  std::ostringstream out;
  out << "topic,strategy,cost_point,beta,score\n";
  for (const auto &r : results) {
    const auto name = strategy_name(r.strategy);
    for (const auto *t : r.kept_topics()) {
      for (double b : r.betas) {
        for (const auto &s : t->snapshots) {
          out << t->topic_id << ',' << name << ','
              << format_double(s.human_fraction) << ',' << format_double(b)
              << ',' << format_double(s.f_beta_scores.at(b)) << '\n';
        }
      }
    }
    for (double b : r.betas) {
      const auto &curve = r.average_curves.at(b);
      for (std::size_t i = 0; i < curve.size(); ++i) {
        out << "AVG," << name << ',' << format_double(r.cost_points[i]) << ','
            << format_double(b) << ',' << format_double(curve[i]) << '\n';
      }
    }
  }
  return out.str();
}

std::string auc_csv(const std::vector<CollectionResult> &results) {
  std::ostringstream out;
  out << "topic,strategy,beta,auc\n";
  for (const auto &r : results) {
    const auto name = strategy_name(r.strategy);
    for (const auto *t : r.kept_topics()) {
      for (double b : r.betas) {
        out << t->topic_id << ',' << name << ',' << format_double(b) << ','
            << format_double(t->auc(b)) << '\n';
      }
    }
    for (double b : r.betas) {
      out << "AVG," << name << ',' << format_double(b) << ','
          << format_double(r.average_auc.at(b)) << '\n';
    }
  }
  return out.str();
}

std::string bins_csv(const std::vector<CollectionResult> &results,
                     int num_bins, double beta) {
  std::ostringstream out;
  out << "strategy,bin,prevalence_low,prevalence_high,num_topics,beta,auc\n";
  for (const auto &r : results) {
    auto bins = bin_by_prevalence(r, num_bins, beta);
    for (std::size_t i = 0; i < bins.size(); ++i) {
      out << strategy_name(r.strategy) << ',' << i << ','
          << format_double(bins[i].low) << ',' << format_double(bins[i].high)
          << ',' << bins[i].topics.size() << ',' << format_double(beta) << ','
          << format_double(bins[i].auc) << '\n';
    }
  }
  return out.str();
}

// ---- JSON ------------------------------------------------------------------

namespace {

json labels_json(const LabelMap &labels) {
  json j = json::object();
  for (const auto &[doc, y] : labels) j[doc] = y;
  return j;
}

LabelMap labels_from(const json &j) {
  LabelMap out;
  for (auto it = j.begin(); it != j.end(); ++it) {
    out.emplace(it.key(), it.value().get<int>());
  }
  return out;
}

json beta_map_json(const std::map<double, double> &m) {
  json arr = json::array();
  for (const auto &[b, v] : m) arr.push_back({b, v});
  return arr;
}

std::map<double, double> beta_map_from(const json &j) {
  std::map<double, double> out;
  for (const auto &kv : j) out[kv.at(0).get<double>()] = kv.at(1).get<double>();
  return out;
}

}  // namespace

std::string collection_results_to_json(
    const std::vector<CollectionResult> &results) {
  json arr = json::array();
  for (const auto &r : results) {
    json topics = json::array();
    for (const auto &t : r.topics) {
      json snaps = json::array();
      for (const auto &s : t.snapshots) {
        json judged = json::array();
        for (const auto &[doc, y] : s.human_judged) judged.push_back({doc, y});
        snaps.push_back({{"human_fraction", s.human_fraction},
                         {"human_count", s.human_count},
                         {"human_judged", judged},
                         {"hybrid_labels", labels_json(s.hybrid_labels)},
                         {"confusion",
                          {s.confusion.tp, s.confusion.fp, s.confusion.fn,
                           s.confusion.tn}},
                         {"f_beta", beta_map_json(s.f_beta_scores)}});
      }
      topics.push_back({{"topic_id", t.topic_id},
                        {"pool_size", t.pool_size},
                        {"prevalence", t.prevalence},
                        {"discarded", t.discarded},
                        {"seed_cost", t.seed_cost},
                        {"batches", t.batches},
                        {"snapshots", snaps}});
    }
    json curves = json::array();
    for (const auto &[b, c] : r.average_curves) curves.push_back({b, c});
    arr.push_back({{"strategy", strategy_name(r.strategy)},
                   {"seed_kind", seed_kind_name(r.seed_kind)},
                   {"oversample", r.oversample},
                   {"cost_points", r.cost_points},
                   {"betas", r.betas},
                   {"average_curves", curves},
                   {"average_auc", beta_map_json(r.average_auc)},
                   {"topics", topics}});
  }
  return arr.dump();
}

std::vector<CollectionResult> collection_results_from_json(
    std::string_view text) {
  std::vector<CollectionResult> out;
  try {
    for (const auto &jr : json::parse(text)) {
      CollectionResult r;
      r.strategy = parse_strategy(jr.at("strategy").get<std::string>());
      r.seed_kind = parse_seed_kind(jr.at("seed_kind").get<std::string>());
      r.oversample = jr.at("oversample").get<bool>();
      r.cost_points = jr.at("cost_points").get<std::vector<double>>();
      r.betas = jr.at("betas").get<std::vector<double>>();
      for (const auto &kv : jr.at("average_curves")) {
        r.average_curves[kv.at(0).get<double>()] =
            kv.at(1).get<std::vector<double>>();
      }
      r.average_auc = beta_map_from(jr.at("average_auc"));
      for (const auto &jt : jr.at("topics")) {
        TopicResult t;
        t.topic_id = jt.at("topic_id").get<std::string>();
        t.pool_size = jt.at("pool_size").get<std::int64_t>();
        t.prevalence = jt.at("prevalence").get<double>();
        t.discarded = jt.at("discarded").get<bool>();
        t.seed_cost = jt.at("seed_cost").get<std::int64_t>();
        t.batches =
            jt.at("batches").get<std::vector<std::vector<std::string>>>();
        for (const auto &js : jt.at("snapshots")) {
          CostSnapshot s;
          s.human_fraction = js.at("human_fraction").get<double>();
          s.human_count = js.at("human_count").get<std::int64_t>();
          for (const auto &p : js.at("human_judged")) {
            s.human_judged.emplace_back(p.at(0).get<std::string>(),
                                        p.at(1).get<int>());
          }
          s.hybrid_labels = labels_from(js.at("hybrid_labels"));
          const auto &c = js.at("confusion");
          s.confusion = {c.at(0).get<std::int64_t>(), c.at(1).get<std::int64_t>(),
                         c.at(2).get<std::int64_t>(), c.at(3).get<std::int64_t>()};
          s.f_beta_scores = beta_map_from(js.at("f_beta"));
          t.snapshots.push_back(std::move(s));
        }
        r.topics.push_back(std::move(t));
      }
      out.push_back(std::move(r));
    }
  } catch (const json::exception &e) {
    throw Error(ErrorCode::kParse,
                std::string("bad simulation results: ") + e.what());
  }
  return out;
}

}  // namespace poolforge
