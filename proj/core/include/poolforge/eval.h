#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "poolforge/corpus.h"
#include "poolforge/metrics.h"
#include "poolforge/simulate.h"

namespace poolforge {

// Conventional bar for a reliable system ranking.
inline constexpr double kReliableTau = 0.9;

enum class TauMode {
  kHumanOnlyBpref,  // partial human qrels, systems scored by bpref
  kHybridMap,       // human + classifier labels over the pool, scored by MAP
};

std::string_view tau_mode_name(TauMode mode);
TauMode parse_tau_mode(std::string_view name);

// Topics of qrels that have at least one relevant document, intersected with
// `restrict_to` when given.
std::vector<std::string> scoreable_topics(
    const Qrels &qrels, const std::set<std::string> *restrict_to = nullptr);

// Mean over `topics` of AP (or bpref); a run without a ranking for a topic
// scores 0 on it.
double mean_average_precision(const SystemRun &run, const Qrels &qrels,
                              const std::vector<std::string> &topics);
double mean_bpref(const SystemRun &run, const Qrels &qrels,
                  const std::vector<std::string> &topics);

// MAP of every run over the scoreable topics of full_qrels (optionally only
// those in restrict_to). Throws kEmptyResult when no topic is scoreable.
Leaderboard ground_truth_leaderboard(
    const std::vector<SystemRun> &runs, const Qrels &full_qrels,
    const std::set<std::string> *restrict_to = nullptr);

// The judgments a snapshot represents. Human-only mode holds exactly the
// human-judged documents; hybrid mode labels the whole pool, with the
// source column telling human from machine labels.
Qrels snapshot_qrels(const CollectionResult &sim, std::size_t cost_index,
                     TauMode mode);

struct TauPoint {
  double human_fraction = 0.0;
  double tau = 0.0;
  bool reliable = false;  // tau >= kReliableTau
};

struct TauCurve {
  TauMode mode = TauMode::kHybridMap;
  SelectionStrategy strategy = SelectionStrategy::kCAL;
  std::vector<TauPoint> points;
  double auc = 0.0;

  std::vector<double> taus() const;
};

// Kendall's tau, per cost point, between the leaderboard induced by the
// snapshot qrels and the MAP ground truth over the same (non-discarded)
// topics. A cost point where every system ties scores tau 0.
TauCurve tau_curve(const CollectionResult &sim,
                   const std::vector<SystemRun> &runs, const Qrels &full_qrels,
                   TauMode mode, TauVariant variant = TauVariant::kB);

struct BetaCorrelation {
  double beta = 0.0;
  std::optional<double> pearson;  // empty when a series is constant
};

// Pearson correlation between the mean F_beta curve and the tau curve, for
// each beta.
std::vector<BetaCorrelation> beta_sweep(const CollectionResult &sim,
                                        const TauCurve &curve,
                                        const std::vector<double> &betas);

// mode,strategy,cost_point,tau,auc,reliable
std::string tau_csv(const std::vector<TauCurve> &curves);
// beta,pearson   ("undefined" when flagged)
std::string beta_sweep_csv(const std::vector<BetaCorrelation> &sweep);

}  // namespace poolforge
