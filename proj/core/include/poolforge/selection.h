#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "poolforge/corpus.h"

namespace poolforge {

// SPL: uniform random. SAL: closest to p = 0.5. CAL: highest p.
enum class SelectionStrategy { kSPL, kSAL, kCAL };

std::string_view strategy_name(SelectionStrategy s);
SelectionStrategy parse_strategy(std::string_view name);  // "SPL"|"SAL"|"CAL"

enum class SeedKind { kIS, kRDS };

std::string_view seed_kind_name(SeedKind k);
SeedKind parse_seed_kind(std::string_view name);  // "IS"|"RDS"

struct SeedConfig {
  SeedKind kind = SeedKind::kIS;
  int is_rel = 5;
  int is_nonrel = 5;
  int rds_min_rel = 1;
  int rds_min_nonrel = 1;
  int rds_max_effort = 100;
  std::uint64_t rng_seed = 0;

  void validate() const;
  bool operator==(const SeedConfig &) const = default;
};

struct SeedJudgment {
  std::string doc_id;
  int label = 0;
  int order = 0;

  bool operator==(const SeedJudgment &) const = default;
};

struct SeedResult {
  std::vector<SeedJudgment> judged;
  int cost = 0;
  bool discarded = false;
};

// Interactive-search seeding: samples is_rel relevant and is_nonrel
// non-relevant pool documents without replacement. Discarded (cost 0) when
// the pool cannot supply both counts.
SeedResult seed_is(const Qrels &pool_qrels, std::string_view topic,
                   const SeedConfig &cfg);

// Rank-based seeding: judges pool documents in rank order (documents outside
// the pool are skipped at no cost) until rds_min_rel relevant and
// rds_min_nonrel non-relevant are found. Discarded when rds_max_effort
// judgments are spent, or the ranking runs out, without success.
SeedResult seed_rds(const SystemRun &run, const Qrels &pool_qrels,
                    std::string_view topic, const SeedConfig &cfg);

// True once the RDS stopping goal is met for the given class counts.
bool rds_goal_met(const SeedConfig &cfg, int relevant, int nonrelevant);

// Binary entropy in nats; 0 * ln 0 is taken as 0.
double uncertainty(double p);

// Picks min(u, |unlabeled|) documents. Ties are broken by doc_id. probs must
// cover every unlabeled document for SAL and CAL; rng_seed is used by SPL.
std::vector<std::string> select_batch(
    SelectionStrategy strategy, const std::map<std::string, double> &probs,
    const std::set<std::string> &unlabeled, int u, std::uint64_t rng_seed);

}  // namespace poolforge
