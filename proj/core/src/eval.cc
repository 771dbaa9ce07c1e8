#include "poolforge/eval.h"

#include <sstream>

#include "poolforge/error.h"
#include "poolforge/io.h"

namespace poolforge {

std::string_view tau_mode_name(TauMode mode) {
  return mode == TauMode::kHumanOnlyBpref ? "human_only_bpref" : "hybrid_map";
}

TauMode parse_tau_mode(std::string_view name) {
  if (name == "human_only_bpref" || name == "human_only") {
    return TauMode::kHumanOnlyBpref;
  }
  if (name == "hybrid_map" || name == "hybrid") return TauMode::kHybridMap;
  throw Error(ErrorCode::kInvalidConfig,
              "unknown evaluation mode '" + std::string(name) + "'");
}

std::vector<std::string> scoreable_topics(
    const Qrels &qrels, const std::set<std::string> *restrict_to) {
  std::vector<std::string> out;
  for (const auto &topic : qrels.topics()) {
    if (restrict_to && !restrict_to->contains(topic)) continue;
    if (qrels.num_relevant(topic) > 0) out.push_back(topic);
  }
  return out;
}

namespace {

template <typename Metric>
double mean_over_topics(const SystemRun &run, const Qrels &qrels,
                        const std::vector<std::string> &topics,
                        Metric metric) {
  if (topics.empty()) {
    throw Error(ErrorCode::kEmptyResult, "no scoreable topics");
  }
  double sum = 0.0;
  for (const auto &topic : topics) {
    const auto *ranking = run.ranking(topic);
    if (!ranking) continue;
    sum += metric(ranking_doc_ids(*ranking), topic_labels(qrels, topic));
  }
  return sum / static_cast<double>(topics.size());
}

}  // namespace

double mean_average_precision(const SystemRun &run, const Qrels &qrels,
                              const std::vector<std::string> &topics) {
  return mean_over_topics(run, qrels, topics,
                          [](const auto &r, const auto &q) {
                            return average_precision(r, q);
                          });
}

double mean_bpref(const SystemRun &run, const Qrels &qrels,
                  const std::vector<std::string> &topics) {
  return mean_over_topics(
      run, qrels, topics,
      [](const auto &r, const auto &q) { return bpref(r, q); });
}

namespace {

void check_runs(const std::vector<SystemRun> &runs) {
  if (runs.size() < 2) {
    throw Error(ErrorCode::kInvalidConfig, "need at least two runs");
  }
  std::set<std::string> ids;
  for (const auto &r : runs) {
    if (!ids.insert(r.system_id).second) {
      throw Error(ErrorCode::kValidation,
                  "duplicate system id " + r.system_id);
    }
  }
}

}  // namespace

Leaderboard ground_truth_leaderboard(const std::vector<SystemRun> &runs,
                                     const Qrels &full_qrels,
                                     const std::set<std::string> *restrict_to) {
  check_runs(runs);
  const auto topics = scoreable_topics(full_qrels, restrict_to);
  std::map<std::string, double> scores;
  for (const auto &run : runs) {
    scores[run.system_id] = mean_average_precision(run, full_qrels, topics);
  }
  return Leaderboard::from_scores(scores);
}

Qrels snapshot_qrels(const CollectionResult &sim, std::size_t cost_index,
                     TauMode mode) {
  Qrels out;
  for (const auto *t : sim.kept_topics()) {
    if (cost_index >= t->snapshots.size()) {
      throw Error(ErrorCode::kInvalidConfig, "cost point index out of range");
    }
    const auto &snap = t->snapshots[cost_index];
    if (mode == TauMode::kHumanOnlyBpref) {
      for (const auto &[doc, label] : snap.human_judged) {
        out.set(t->topic_id, doc, label, JudgmentSource::kHuman);
      }
      continue;
    }
    if (static_cast<std::int64_t>(snap.hybrid_labels.size()) != t->pool_size) {
      throw Error(ErrorCode::kInvalidConfig,
                  "snapshot for topic " + t->topic_id +
                      " lacks hybrid labels for the whole pool");
    }
    LabelMap human(snap.human_judged.begin(), snap.human_judged.end());
    for (const auto &[doc, label] : snap.hybrid_labels) {
      out.set(t->topic_id, doc, label,
              human.contains(doc) ? JudgmentSource::kHuman
                                  : JudgmentSource::kMachine);
    }
  }
  return out;
}

std::vector<double> TauCurve::taus() const {
  std::vector<double> out;
  for (const auto &p : points) out.push_back(p.tau);
  return out;
}

TauCurve tau_curve(const CollectionResult &sim,
                   const std::vector<SystemRun> &runs, const Qrels &full_qrels,
                   TauMode mode, TauVariant variant) {
  check_runs(runs);
  std::set<std::string> kept;
  for (const auto *t : sim.kept_topics()) kept.insert(t->topic_id);
  if (kept.empty()) {
    throw Error(ErrorCode::kEmptyResult, "simulation kept no topics");
  }
  const Leaderboard truth = ground_truth_leaderboard(runs, full_qrels, &kept);

  TauCurve curve;
  curve.mode = mode;
  curve.strategy = sim.strategy;
  for (std::size_t i = 0; i < sim.cost_points.size(); ++i) {
    const Qrels q = snapshot_qrels(sim, i, mode);
    const auto topics = scoreable_topics(q, &kept);
    std::map<std::string, double> scores;
    for (const auto &run : runs) {
      scores[run.system_id] = mode == TauMode::kHumanOnlyBpref
                                  ? mean_bpref(run, q, topics)
                                  : mean_average_precision(run, q, topics);
    }
    TauPoint p;
    p.human_fraction = sim.cost_points[i];
    try {
      p.tau = kendall_tau(Leaderboard::from_scores(scores), truth, variant);
    } catch (const Error &e) {
      // Every system tied: the qrels carry no ordering at all.
      if (e.code() != ErrorCode::kUndefined) throw;
      p.tau = 0.0;
    }
    p.reliable = p.tau >= kReliableTau;
    curve.points.push_back(p);
  }
  curve.auc = auc_trapezoid(sim.cost_points, curve.taus());
  return curve;
}

std::vector<BetaCorrelation> beta_sweep(const CollectionResult &sim,
                                        const TauCurve &curve,
                                        const std::vector<double> &betas) {
  if (curve.points.size() != sim.cost_points.size()) {
    throw Error(ErrorCode::kInvalidConfig,
                "tau curve does not align with the simulation cost points");
  }
  const auto taus = curve.taus();
  std::vector<BetaCorrelation> out;
  for (double beta : betas) {
    auto it = sim.average_curves.find(beta);
    if (it == sim.average_curves.end()) {
      throw Error(ErrorCode::kInvalidConfig,
                  "simulation has no F_beta scores for beta " +
                      format_double(beta));
    }
    BetaCorrelation bc;
    bc.beta = beta;
    try {
      bc.pearson = pearson(it->second, taus);
    } catch (const Error &e) {
      if (e.code() != ErrorCode::kUndefined) throw;
    }
    out.push_back(bc);
  }
  return out;
}

std::string tau_csv(const std::vector<TauCurve> &curves) {
  std::ostringstream out;
  out << "mode,strategy,cost_point,tau,auc,reliable\n";
  for (const auto &c : curves) {
    for (const auto &p : c.points) {
      out << tau_mode_name(c.mode) << ',' << strategy_name(c.strategy) << ','
          << format_double(p.human_fraction) << ',' << format_double(p.tau)
          << ',' << format_double(c.auc) << ',' << (p.reliable ? 1 : 0)
          << '\n';
    }
  }
  return out.str();
}

std::string beta_sweep_csv(const std::vector<BetaCorrelation> &sweep) {
  std::ostringstream out;
  out << "beta,pearson\n";
  for (const auto &b : sweep) {
    out << format_double(b.beta) << ','
        << (b.pearson ? format_double(*b.pearson) : "undefined") << '\n';
  }
  return out.str();
}

}  // namespace poolforge
