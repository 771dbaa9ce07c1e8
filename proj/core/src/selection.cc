#include "poolforge/selection.h"

#include <algorithm>
#include <cmath>

#include "poolforge/error.h"
#include "poolforge/rng.h"

namespace poolforge {

std::string_view strategy_name(SelectionStrategy s) {
  switch (s) {
    case SelectionStrategy::kSPL: return "SPL";
    case SelectionStrategy::kSAL: return "SAL";
    case SelectionStrategy::kCAL: return "CAL";
  }
  return "?";
}

SelectionStrategy parse_strategy(std::string_view name) {
  if (name == "SPL") return SelectionStrategy::kSPL;
  if (name == "SAL") return SelectionStrategy::kSAL;
  if (name == "CAL") return SelectionStrategy::kCAL;
  throw Error(ErrorCode::kInvalidConfig,
              "unknown strategy '" + std::string(name) + "'");
}

std::string_view seed_kind_name(SeedKind k) {
  return k == SeedKind::kIS ? "IS" : "RDS";
}

SeedKind parse_seed_kind(std::string_view name) {
  if (name == "IS") return SeedKind::kIS;
  if (name == "RDS") return SeedKind::kRDS;
  throw Error(ErrorCode::kInvalidConfig,
              "unknown seed kind '" + std::string(name) + "'");
}

void SeedConfig::validate() const {
  if (is_rel < 1 || is_nonrel < 1 || rds_min_rel < 1 || rds_min_nonrel < 1 ||
      rds_max_effort < 1) {
    throw Error(ErrorCode::kInvalidConfig, "seed counts must be >= 1");
  }
}

SeedResult seed_is(const Qrels &pool_qrels, std::string_view topic,
                   const SeedConfig &cfg) {
  cfg.validate();
  if (cfg.kind != SeedKind::kIS) {
    throw Error(ErrorCode::kInvalidConfig, "seed_is requires kind IS");
  }
  const auto *judgments = pool_qrels.topic(topic);
  if (!judgments) {
    throw Error(ErrorCode::kNotFound, "unknown topic " + std::string(topic));
  }
  std::vector<std::string> rel, nonrel;
  for (const auto &[doc, j] : *judgments) {
    (j.label ? rel : nonrel).push_back(doc);
  }
  SeedResult out;
  if (rel.size() < static_cast<std::size_t>(cfg.is_rel) ||
      nonrel.size() < static_cast<std::size_t>(cfg.is_nonrel)) {
    out.discarded = true;
    return out;
  }
  Rng rng(cfg.rng_seed);
  int order = 0;
  for (std::size_t i : rng.sample_without_replacement(rel.size(), cfg.is_rel)) {
    out.judged.push_back({rel[i], 1, order++});
  }
  for (std::size_t i :
       rng.sample_without_replacement(nonrel.size(), cfg.is_nonrel)) {
    out.judged.push_back({nonrel[i], 0, order++});
  }
  out.cost = static_cast<int>(out.judged.size());
  return out;
}

bool rds_goal_met(const SeedConfig &cfg, int relevant, int nonrelevant) {
  return relevant >= cfg.rds_min_rel && nonrelevant >= cfg.rds_min_nonrel;
}

SeedResult seed_rds(const SystemRun &run, const Qrels &pool_qrels,
                    std::string_view topic, const SeedConfig &cfg) {
  cfg.validate();
  if (cfg.kind != SeedKind::kRDS) {
    throw Error(ErrorCode::kInvalidConfig, "seed_rds requires kind RDS");
  }
  const auto *ranking = run.ranking(topic);
  if (!ranking) {
    throw Error(ErrorCode::kNotFound, "run " + run.system_id +
                                          " has no ranking for topic " +
                                          std::string(topic));
  }
  SeedResult out;
  int rel = 0, nonrel = 0;
  for (const auto &entry : *ranking) {
    if (out.cost >= cfg.rds_max_effort) break;
    auto j = pool_qrels.find(topic, entry.doc_id);
    if (!j) continue;
    out.judged.push_back({entry.doc_id, j->label, out.cost});
    ++out.cost;
    (j->label ? rel : nonrel) += 1;
    if (rds_goal_met(cfg, rel, nonrel)) return out;
  }
  out.discarded = true;
  return out;
}

double uncertainty(double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw Error(ErrorCode::kDomain, "probability outside [0, 1]");
  }
  auto term = [](double q) { return q > 0.0 ? q * std::log(q) : 0.0; };
  const double h = -(term(p) + term(1.0 - p));
  return h > 0.0 ? h : 0.0;
}

std::vector<std::string> select_batch(
    SelectionStrategy strategy, const std::map<std::string, double> &probs,
    const std::set<std::string> &unlabeled, int u, std::uint64_t rng_seed) {
  if (u < 1) throw Error(ErrorCode::kInvalidConfig, "batch size must be >= 1");
  const std::size_t k = std::min<std::size_t>(u, unlabeled.size());
  std::vector<std::string> docs(unlabeled.begin(), unlabeled.end());
  if (strategy == SelectionStrategy::kSPL) {
    Rng rng(rng_seed);
    std::vector<std::string> out;
    out.reserve(k);
    for (std::size_t i : rng.sample_without_replacement(docs.size(), k)) {
      out.push_back(docs[i]);
    }
    return out;
  }

  std::vector<std::pair<double, const std::string *>> keyed;
  keyed.reserve(docs.size());
  for (const auto &d : docs) {
    auto it = probs.find(d);
    if (it == probs.end()) {
      throw Error(ErrorCode::kValidation, "no probability for document " + d);
    }
    const double p = it->second;
    // Smaller key first.
    keyed.emplace_back(strategy == SelectionStrategy::kSAL ? std::abs(p - 0.5)
                                                           : -p,
                       &d);
  }
  std::partial_sort(keyed.begin(), keyed.begin() + k, keyed.end(),
                    [](const auto &a, const auto &b) {
                      if (a.first != b.first) return a.first < b.first;
                      return *a.second < *b.second;
                    });
  std::vector<std::string> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i) out.push_back(*keyed[i].second);
  return out;
}

}  // namespace poolforge
