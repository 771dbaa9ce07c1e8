#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "poolforge/corpus.h"
#include "poolforge/metrics.h"
#include "poolforge/model.h"
#include "poolforge/selection.h"

namespace poolforge {

using LabelMap = std::map<std::string, int>;

std::vector<double> default_cost_points();  // 0.0, 0.1, ..., 1.0
std::vector<double> default_betas();        // 0.25, 0.5, 1, 3, 5

struct SimulationConfig {
  SelectionStrategy strategy = SelectionStrategy::kCAL;
  SeedConfig seed;
  TrainConfig train;
  double batch_fraction = 0.10;
  std::vector<double> cost_points = default_cost_points();
  std::optional<std::int64_t> budget;  // unset: unlimited
  std::uint64_t rng_seed = 0;
  std::vector<double> betas = default_betas();
  // System whose ranking seeds RDS; empty picks one uniformly at random.
  std::string rds_system;

  void validate() const;
};

// JSON object with the fields above (strategy, seed{...}, train{...},
// batch_fraction, cost_points, budget, rng_seed, betas, rds_system). Parsing
// starts from `base` and rejects unknown keys.
std::string simulation_config_to_json(const SimulationConfig &cfg);
SimulationConfig simulation_config_from_json(std::string_view text,
                                             const SimulationConfig &base = {});

// Batch size for a pool: ceil(batch_fraction * pool_size), at least 1.
int batch_size_for(double batch_fraction, std::size_t pool_size);

// Judged documents keep their human label; every other pool document is
// labeled 1 iff predict_proba > 0.5 (exactly 0.5 is non-relevant).
LabelMap hybrid_labels(const LabelMap &human, const LogisticModel &model,
                       const std::vector<std::string> &pool,
                       const VectorStore &vectors);

// The per-topic state of the active-learning loop: judged set, unlabeled
// remainder and the current classifier. The simulator and the live judging
// service both drive this class, so a session log replayed through the
// simulator reproduces the same batches.
//
// Randomness is keyed by the number of judgments so far:
//   selection   derive_seed(rng_seed, topic, "select", |judged|)
//   oversample  derive_seed(rng_seed, topic, "oversample", |judged|)
// and the training set is ordered by doc_id, so the model depends only on
// the set of judgments, not on the order they arrived in.
class TopicLearner {
 public:
  TopicLearner(std::string topic, std::vector<std::string> pool,
               const VectorStore &vectors, SelectionStrategy strategy,
               TrainConfig train_config, std::uint64_t rng_seed);

  const std::string &topic() const { return topic_; }
  const std::vector<std::string> &pool() const { return pool_; }
  const LabelMap &judged() const { return judged_; }
  const std::set<std::string> &unlabeled() const { return unlabeled_; }
  bool has_model() const { return model_.has_value(); }
  const LogisticModel &model() const;

  bool is_pool_doc(std::string_view doc_id) const;

  // Throws kValidation for documents outside the pool or already judged.
  void record(const std::string &doc_id, int label);

  // Retrains on every judgment when both classes are present; returns
  // whether a model now exists.
  bool retrain();

  // min(batch, |unlabeled|) documents picked by the strategy. SAL and CAL
  // need a model.
  std::vector<std::string> select(int batch) const;

  // Probability of relevance for every unlabeled document.
  std::map<std::string, double> unlabeled_probabilities() const;

  LabelMap hybrid() const;

 private:
  std::string topic_;
  std::vector<std::string> pool_;
  const VectorStore *vectors_;
  SelectionStrategy strategy_;
  TrainConfig train_config_;
  std::uint64_t rng_seed_;
  LabelMap judged_;
  std::set<std::string> unlabeled_;
  std::optional<LogisticModel> model_;
};

struct CostSnapshot {
  double human_fraction = 0.0;  // the configured cost point
  std::int64_t human_count = 0;  // judgments actually spent
  std::vector<std::pair<std::string, int>> human_judged;  // judgment order
  LabelMap hybrid_labels;
  ConfusionCounts confusion;
  std::map<double, double> f_beta_scores;
};

struct TopicResult {
  std::string topic_id;
  std::int64_t pool_size = 0;
  double prevalence = 0.0;
  bool discarded = false;
  std::int64_t seed_cost = 0;
  // Documents in the order they were put in front of the oracle: one batch
  // per seed judgment, then one per active-learning round.
  std::vector<std::vector<std::string>> batches;
  std::vector<CostSnapshot> snapshots;

  // AUC of F_beta over the cost points.
  double auc(double beta) const;
};

// One topic through seeding and the batch loop against the pool qrels as an
// infallible oracle. Each snapshot holds the latest state whose human cost
// does not exceed floor(cost_point * pool_size), or the seed-only state when
// the seed already costs more.
TopicResult run_topic(std::string_view topic, const Qrels &pool_qrels,
                      const SystemRun *run_for_rds, const VectorStore &vectors,
                      const SimulationConfig &cfg);

struct PrevalenceBin {
  double low = 0.0;
  double high = 0.0;
  std::vector<std::string> topics;
  std::vector<double> curve;  // mean F_beta per cost point
  double auc = 0.0;
};

struct CollectionResult {
  SelectionStrategy strategy = SelectionStrategy::kCAL;
  SeedKind seed_kind = SeedKind::kIS;
  bool oversample = true;
  std::vector<double> cost_points;
  std::vector<double> betas;
  std::vector<TopicResult> topics;  // sorted by topic_id, discarded included
  std::map<double, std::vector<double>> average_curves;  // beta -> curve
  std::map<double, double> average_auc;                  // beta -> AUC

  std::vector<const TopicResult *> kept_topics() const;
  std::set<std::string> discarded_topics() const;
};

// The run whose rankings seed RDS: cfg.rds_system when set, otherwise one
// drawn with derive_seed(rng_seed, "", "rds_run") from the runs sorted by id.
const SystemRun &choose_rds_run(const SimulationConfig &cfg,
                                const std::vector<SystemRun> &runs);

// Runs every topic (optionally on several threads) and macro-averages F_beta
// per cost point over non-discarded topics. Throws kEmptyResult when every
// topic is discarded.
CollectionResult run_collection(const std::vector<std::string> &topics,
                                const Qrels &qrels, const VectorStore &vectors,
                                const SimulationConfig &cfg,
                                const std::vector<SystemRun> &runs,
                                int threads = 1);

// Equal-width bins over the observed prevalence range of kept topics; a
// collection whose topics share one prevalence yields a single bin. Empty
// bins are dropped.
std::vector<PrevalenceBin> bin_by_prevalence(const CollectionResult &result,
                                             int num_bins, double beta = 1.0);

// CSV writers. Column order is fixed:
//   curves: topic,strategy,cost_point,beta,score    (topic "AVG" = mean)
//   auc:    topic,strategy,beta,auc
//   bins:   strategy,bin,prevalence_low,prevalence_high,num_topics,beta,auc
std::string curves_csv(const std::vector<CollectionResult> &results);
std::string auc_csv(const std::vector<CollectionResult> &results);
std::string bins_csv(const std::vector<CollectionResult> &results,
                     int num_bins, double beta = 1.0);

std::string collection_results_to_json(
    const std::vector<CollectionResult> &results);
std::vector<CollectionResult> collection_results_from_json(
    std::string_view text);

}  // namespace poolforge
