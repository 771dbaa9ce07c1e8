#include "poolforge/metrics.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "poolforge/error.h"

namespace poolforge {

ConfusionCounts confusion(const std::map<std::string, int> &predicted,
                          const std::map<std::string, int> &truth) {
  ConfusionCounts c;
  for (const auto &[doc, y] : truth) {
    auto it = predicted.find(doc);
    const int yhat = it == predicted.end() ? 0 : it->second;
    if (yhat && y) {
      ++c.tp;
    } else if (yhat && !y) {
      ++c.fp;
    } else if (!yhat && y) {
      ++c.fn;
    } else {
      ++c.tn;
    }
  }
  return c;
}

double f_beta(const ConfusionCounts &c, double beta) {
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw Error(ErrorCode::kDomain, "beta must be > 0");
  }
  if (c.tp < 0 || c.fp < 0 || c.fn < 0 || c.tn < 0) {
    throw Error(ErrorCode::kDomain, "negative confusion count");
  }
  if (c.tp == 0 && c.fp == 0 && c.fn == 0) return 1.0;
  if (c.tp == 0) return 0.0;
  const double p = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
  const double r = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
  const double b2 = beta * beta;
  return (1.0 + b2) * p * r / (b2 * p + r);
}

TopicQrels topic_labels(const Qrels &qrels, std::string_view topic) {
  TopicQrels out;
  if (const auto *t = qrels.topic(topic)) {
    for (const auto &[doc, j] : *t) out.emplace(doc, j.label);
  }
  return out;
}

namespace {

std::size_t count_label(const TopicQrels &qrels, int label) {
  return static_cast<std::size_t>(std::count_if(
      qrels.begin(), qrels.end(),
      [label](const auto &kv) { return kv.second == label; }));
}

}  // namespace

double average_precision(std::span<const std::string> ranking,
                         const TopicQrels &qrels) {
  const std::size_t num_rel = count_label(qrels, 1);
  if (num_rel == 0) {
    throw Error(ErrorCode::kUndefined, "average precision undefined: no "
                                       "relevant documents");
  }
  double sum = 0.0;
  std::size_t rel_so_far = 0;
  for (std::size_t i = 0; i < ranking.size(); ++i) {
    auto it = qrels.find(ranking[i]);
    if (it != qrels.end() && it->second == 1) {
      ++rel_so_far;
      sum += static_cast<double>(rel_so_far) / static_cast<double>(i + 1);
    }
  }
  return sum / static_cast<double>(num_rel);
}

double bpref(std::span<const std::string> ranking, const TopicQrels &qrels) {
  const std::size_t num_rel = count_label(qrels, 1);
  const std::size_t num_nonrel = count_label(qrels, 0);
  if (num_rel == 0) {
    throw Error(ErrorCode::kUndefined, "bpref undefined: no relevant "
                                       "documents");
  }
  const double denom = static_cast<double>(std::min(num_rel, num_nonrel));
  double sum = 0.0;
  std::size_t nonrel_so_far = 0;
  for (const auto &doc : ranking) {
    auto it = qrels.find(doc);
    if (it == qrels.end()) continue;
    if (it->second == 1) {
      if (nonrel_so_far > 0) {
        sum += 1.0 -
               static_cast<double>(std::min(nonrel_so_far, num_rel)) / denom;
      } else {
        sum += 1.0;
      }
    } else {
      ++nonrel_so_far;
    }
  }
  return sum / static_cast<double>(num_rel);
}

std::vector<std::string> ranking_doc_ids(const std::vector<RankedDoc> &docs) {
  std::vector<std::string> out;
  out.reserve(docs.size());
  for (const auto &d : docs) out.push_back(d.doc_id);
  return out;
}

Leaderboard Leaderboard::from_scores(
    const std::map<std::string, double> &scores) {
  Leaderboard lb;
  lb.entries.assign(scores.begin(), scores.end());
  std::stable_sort(lb.entries.begin(), lb.entries.end(),
                   [](const auto &a, const auto &b) {
                     if (a.second != b.second) return a.second > b.second;
                     return a.first < b.first;
                   });
  return lb;
}

std::map<std::string, double> Leaderboard::scores() const {
  return {entries.begin(), entries.end()};
}

double kendall_tau(const Leaderboard &a, const Leaderboard &b,
                   TauVariant variant) {
  const auto sa = a.scores();
  const auto sb = b.scores();
  if (sa.size() != a.entries.size() || sb.size() != b.entries.size()) {
    throw Error(ErrorCode::kValidation, "duplicate system in leaderboard");
  }
  if (sa.size() != sb.size() ||
      !std::equal(sa.begin(), sa.end(), sb.begin(),
                  [](const auto &x, const auto &y) {
                    return x.first == y.first;
                  })) {
    throw Error(ErrorCode::kValidation,
                "leaderboards cover different systems");
  }
  if (sa.size() < 2) {
    throw Error(ErrorCode::kUndefined, "tau needs at least two systems");
  }
  std::vector<double> xa, xb;
  for (const auto &[id, s] : sa) {
    xa.push_back(s);
    xb.push_back(sb.at(id));
  }
  const std::size_t n = xa.size();
  std::int64_t concordant = 0, discordant = 0, ties_a = 0, ties_b = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double da = xa[i] - xa[j];
      const double db = xb[i] - xb[j];
      if (da == 0.0) ++ties_a;
      if (db == 0.0) ++ties_b;
      if (da == 0.0 || db == 0.0) continue;
      if ((da > 0) == (db > 0)) {
        ++concordant;
      } else {
        ++discordant;
      }
    }
  }
  const double pairs = static_cast<double>(n * (n - 1) / 2);
  const double num = static_cast<double>(concordant - discordant);
  if (variant == TauVariant::kA) return num / pairs;
  const double denom = std::sqrt((pairs - static_cast<double>(ties_a)) *
                                 (pairs - static_cast<double>(ties_b)));
  if (denom == 0.0) {
    throw Error(ErrorCode::kUndefined, "tau-b undefined: a leaderboard is "
                                       "entirely tied");
  }
  return num / denom;
}

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw Error(ErrorCode::kDomain,
                "pearson needs two equal-length series of length >= 2");
  }
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw Error(ErrorCode::kUndefined, "pearson undefined: zero variance");
  }
  const double r = sxy / std::sqrt(sxx * syy);
  return std::clamp(r, -1.0, 1.0);
}

double auc_trapezoid(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size() || xs.size() < 2) {
    throw Error(ErrorCode::kDomain,
                "auc needs two equal-length series of length >= 2");
  }
  double area = 0.0;
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    if (!(xs[i + 1] > xs[i])) {
      throw Error(ErrorCode::kDomain, "auc xs must be strictly ascending");
    }
    area += (xs[i + 1] - xs[i]) * (ys[i] + ys[i + 1]) / 2.0;
  }
  return area;
}

}  // namespace poolforge
