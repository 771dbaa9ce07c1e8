#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "poolforge/corpus.h"

namespace poolforge {

struct ConfusionCounts {
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;
  std::int64_t tn = 0;

  std::int64_t total() const { return tp + fp + fn + tn; }
  bool operator==(const ConfusionCounts &) const = default;
};

// Predicted labels vs truth over the keys of truth. A key missing from
// predicted counts as predicted 0.
ConfusionCounts confusion(const std::map<std::string, int> &predicted,
                          const std::map<std::string, int> &truth);

// (1 + b^2) P R / (b^2 P + R). tp = fp = fn = 0 gives 1; otherwise tp = 0
// gives 0.
double f_beta(const ConfusionCounts &c, double beta);

// Relevance of one topic's documents: doc_id -> 0/1. Documents absent from
// the map are unjudged.
using TopicQrels = std::map<std::string, int, std::less<>>;

TopicQrels topic_labels(const Qrels &qrels, std::string_view topic);

// Uninterpolated AP; unjudged documents count as non-relevant. Throws
// kUndefined when the topic has no relevant documents.
double average_precision(std::span<const std::string> ranking,
                         const TopicQrels &qrels);

// bpref as computed by trec_eval: unjudged documents are skipped, only the
// first R judged non-relevant documents penalize, and with N = 0 the score
// is (relevant retrieved) / R. Throws kUndefined when R = 0.
double bpref(std::span<const std::string> ranking, const TopicQrels &qrels);

std::vector<std::string> ranking_doc_ids(const std::vector<RankedDoc> &docs);

struct Leaderboard {
  // Sorted by score descending, ties by system_id ascending.
  std::vector<std::pair<std::string, double>> entries;

  static Leaderboard from_scores(const std::map<std::string, double> &scores);
  std::map<std::string, double> scores() const;
};

enum class TauVariant {
  kA,  // (C - D) / (n choose 2)
  kB,  // tie-adjusted
};

// Kendall's tau between the score-induced orderings of two leaderboards over
// the same systems. Throws kUndefined with fewer than two systems or when
// the tie-adjusted denominator is zero.
double kendall_tau(const Leaderboard &a, const Leaderboard &b,
                   TauVariant variant = TauVariant::kB);

// Sample Pearson correlation. Throws kUndefined on zero variance.
double pearson(std::span<const double> x, std::span<const double> y);

// Trapezoid-rule area; xs strictly ascending.
double auc_trapezoid(std::span<const double> xs, std::span<const double> ys);

}  // namespace poolforge
