#include "oracles.h"

#include <cmath>
#include <functional>
#include <set>
#include <sstream>

#include "poolforge/error.h"
#include "poolforge/metrics.h"

namespace poolforge::oracle {

double f_beta(long tp, long fp, long fn, double beta) {
  if (tp == 0 && fp == 0 && fn == 0) return 1.0;
  const double p = tp + fp > 0 ? static_cast<double>(tp) / (tp + fp) : 0.0;
  const double r = tp + fn > 0 ? static_cast<double>(tp) / (tp + fn) : 0.0;
  if (p == 0.0 && r == 0.0) return 0.0;
  const double b2 = beta * beta;
  return (1 + b2) * p * r / (b2 * p + r);
}

namespace {

int label_of(const Labels &labels, const std::string &doc) {
  auto it = labels.find(doc);
  return it == labels.end() ? -1 : it->second;
}

long count_label(const Labels &labels, int label) {
  long n = 0;
  for (const auto &[d, l] : labels) n += l == label;
  return n;
}

}  // namespace

std::optional<double> average_precision(const std::vector<std::string> &ranking,
                                        const Labels &labels) {
  const long R = count_label(labels, 1);
  if (R == 0) return std::nullopt;
  double sum = 0.0;
  for (std::size_t k = 0; k < ranking.size(); ++k) {
    if (label_of(labels, ranking[k]) != 1) continue;
    // precision at rank k + 1, recounted from the top
    long rel = 0;
    for (std::size_t i = 0; i <= k; ++i) rel += label_of(labels, ranking[i]) == 1;
    sum += static_cast<double>(rel) / static_cast<double>(k + 1);
  }
  return sum / static_cast<double>(R);
}

std::optional<double> bpref(const std::vector<std::string> &ranking,
                            const Labels &labels) {
  const long R = count_label(labels, 1);
  const long N = count_label(labels, 0);
  if (R == 0) return std::nullopt;
  // The first R judged non-relevant documents of the ranking.
  std::set<std::size_t> first_nonrel;
  for (std::size_t i = 0; i < ranking.size(); ++i) {
    if (label_of(labels, ranking[i]) == 0 &&
        static_cast<long>(first_nonrel.size()) < R) {
      first_nonrel.insert(i);
    }
  }
  const long denom = std::min(R, N);
  double sum = 0.0;
  for (std::size_t k = 0; k < ranking.size(); ++k) {
    if (label_of(labels, ranking[k]) != 1) continue;
    long above = 0;
    for (std::size_t i : first_nonrel) above += i < k;
    sum += denom == 0 ? 1.0 : 1.0 - static_cast<double>(above) / denom;
  }
  return sum / static_cast<double>(R);
}

std::optional<double> kendall_tau(const std::map<std::string, double> &a,
                                  const std::map<std::string, double> &b,
                                  bool tie_adjusted) {
  std::vector<std::pair<double, double>> v;
  for (const auto &[k, x] : a) v.push_back({x, b.at(k)});
  const long n = static_cast<long>(v.size());
  if (n < 2) return std::nullopt;
  long concordant = 0, discordant = 0, ties_a = 0, ties_b = 0;
  for (long i = 0; i < n; ++i) {
    for (long j = i + 1; j < n; ++j) {
      const double da = v[i].first - v[j].first;
      const double db = v[i].second - v[j].second;
      if (da == 0) ++ties_a;
      if (db == 0) ++ties_b;
      if (da * db > 0) ++concordant;
      if (da * db < 0) ++discordant;
    }
  }
  const double n0 = n * (n - 1) / 2.0;
  if (!tie_adjusted) return (concordant - discordant) / n0;
  const double denom = std::sqrt((n0 - ties_a) * (n0 - ties_b));
  if (denom == 0) return std::nullopt;
  return (concordant - discordant) / denom;
}

std::optional<double> pearson(const std::vector<double> &x,
                              const std::vector<double> &y) {
  const long double n = x.size();
  long double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += static_cast<long double>(x[i]) * x[i];
    syy += static_cast<long double>(y[i]) * y[i];
    sxy += static_cast<long double>(x[i]) * y[i];
  }
  const long double vx = n * sxx - sx * sx;
  const long double vy = n * syy - sy * sy;
  if (vx <= 1e-18L || vy <= 1e-18L) return std::nullopt;
  return static_cast<double>((n * sxy - sx * sy) / std::sqrt(vx * vy));
}

double auc(const std::vector<double> &xs, const std::vector<double> &ys) {
  double area = 0.0;
  for (std::size_t i = 1; i < xs.size(); ++i) {
    const double dx = xs[i] - xs[i - 1];
    area += std::min(ys[i], ys[i - 1]) * dx +
            std::abs(ys[i] - ys[i - 1]) * dx / 2.0;
  }
  return area;
}

namespace {

class Tally {
 public:
  explicit Tally(std::string metric) { r_.metric = std::move(metric); }

  void check(const std::optional<double> &expected,
             const std::function<double()> &actual,
             const std::function<std::string()> &describe) {
    ++r_.cases;
    std::optional<double> got;
    try {
      got = actual();
    } catch (const Error &e) {
      if (e.code() != ErrorCode::kUndefined) throw;
    }
    bool bad = expected.has_value() != got.has_value();
    if (!bad && expected) {
      const double err = std::abs(*expected - *got);
      r_.max_error = std::max(r_.max_error, err);
      bad = !(err <= 1e-9);
    }
    if (bad) {
      if (r_.mismatches++ == 0) {
        std::ostringstream os;
        os << describe() << ": expected "
           << (expected ? std::to_string(*expected) : "undefined") << ", got "
           << (got ? std::to_string(*got) : "undefined");
        r_.first_failure = os.str();
      }
    }
  }

  SuiteResult result() const { return r_; }

 private:
  SuiteResult r_;
};

// Every ranking of 0..6 documents where each position is relevant,
// non-relevant or unjudged, plus 0..2 relevant and 0..2 non-relevant
// judged documents that were not retrieved.
void for_each_ranking(
    const std::function<void(const std::vector<std::string> &,
                             const Labels &)> &fn) {
  for (int n = 0; n <= 6; ++n) {
    int combos = 1;
    for (int i = 0; i < n; ++i) combos *= 3;
    for (int code = 0; code < combos; ++code) {
      for (int extra_rel = 0; extra_rel <= 2; ++extra_rel) {
        for (int extra_non = 0; extra_non <= 2; ++extra_non) {
          std::vector<std::string> ranking;
          Labels labels;
          int c = code;
          for (int i = 0; i < n; ++i, c /= 3) {
            const std::string d = "d" + std::to_string(i);
            ranking.push_back(d);
            if (c % 3 < 2) labels[d] = c % 3;
          }
          for (int i = 0; i < extra_rel; ++i) labels["xr" + std::to_string(i)] = 1;
          for (int i = 0; i < extra_non; ++i) labels["xn" + std::to_string(i)] = 0;
          fn(ranking, labels);
        }
      }
    }
  }
}

std::string show(const std::vector<std::string> &ranking, const Labels &labels) {
  std::string s = "ranking [";
  for (const auto &d : ranking) {
    const int l = label_of(labels, d);
    s += l == 1 ? 'R' : l == 0 ? 'N' : '-';
  }
  s += "] R=" + std::to_string(count_label(labels, 1)) +
       " N=" + std::to_string(count_label(labels, 0));
  return s;
}

TopicQrels to_topic(const Labels &labels) {
  return TopicQrels(labels.begin(), labels.end());
}

std::vector<double> grid_vector(int code, int n, int base) {
  std::vector<double> v;
  for (int i = 0; i < n; ++i, code /= base) v.push_back(code % base);
  return v;
}

std::string show_vec(const std::vector<double> &v) {
  std::string s = "(";
  for (double x : v) s += std::to_string(x) + " ";
  return s + ")";
}

}  // namespace

std::vector<SuiteResult> run_metric_suite() {
  std::vector<SuiteResult> out;

  {
    Tally t("f_beta");
    for (long tp = 0; tp <= 6; ++tp) {
      for (long fp = 0; fp <= 6; ++fp) {
        for (long fn = 0; fn <= 6; ++fn) {
          for (double beta : {0.25, 0.5, 1.0, 2.0, 3.0, 5.0}) {
            ConfusionCounts c{tp, fp, fn, 3};
            t.check(f_beta(tp, fp, fn, beta),
                    [&] { return poolforge::f_beta(c, beta); }, [&] {
                      return "tp=" + std::to_string(tp) + " fp=" +
                             std::to_string(fp) + " fn=" + std::to_string(fn);
                    });
          }
        }
      }
    }
    out.push_back(t.result());
  }

  {
    Tally ap("average_precision"), bp("bpref");
    for_each_ranking([&](const auto &ranking, const Labels &labels) {
      const TopicQrels q = to_topic(labels);
      auto desc = [&] { return show(ranking, labels); };
      ap.check(average_precision(ranking, labels),
               [&] { return poolforge::average_precision(ranking, q); }, desc);
      bp.check(bpref(ranking, labels),
               [&] { return poolforge::bpref(ranking, q); }, desc);
    });
    out.push_back(ap.result());
    out.push_back(bp.result());
  }

  {
    Tally ta("kendall_tau_a"), tb("kendall_tau_b");
    for (int n = 1; n <= 5; ++n) {
      int combos = 1;
      for (int i = 0; i < n; ++i) combos *= 3;
      for (int ca = 0; ca < combos; ++ca) {
        for (int cb = 0; cb < combos; ++cb) {
          const auto va = grid_vector(ca, n, 3), vb = grid_vector(cb, n, 3);
          std::map<std::string, double> a, b;
          for (int i = 0; i < n; ++i) {
            a["s" + std::to_string(i)] = va[i];
            b["s" + std::to_string(i)] = vb[i];
          }
          const Leaderboard la = Leaderboard::from_scores(a);
          const Leaderboard lb = Leaderboard::from_scores(b);
          auto desc = [&] { return show_vec(va) + " vs " + show_vec(vb); };
          // tau_a is undefined below two systems as well.
          ta.check(kendall_tau(a, b, false),
                   [&] { return poolforge::kendall_tau(la, lb, TauVariant::kA); },
                   desc);
          tb.check(kendall_tau(a, b, true),
                   [&] { return poolforge::kendall_tau(la, lb, TauVariant::kB); },
                   desc);
        }
      }
    }
    out.push_back(ta.result());
    out.push_back(tb.result());
  }

  {
    Tally t("pearson");
    for (int n = 2; n <= 5; ++n) {
      int combos = 1;
      for (int i = 0; i < n; ++i) combos *= 4;
      for (int cx = 0; cx < combos; ++cx) {
        for (int cy = 0; cy < combos; cy += 3) {
          const auto x = grid_vector(cx, n, 4), y = grid_vector(cy, n, 4);
          t.check(pearson(x, y), [&] { return poolforge::pearson(x, y); },
                  [&] { return show_vec(x) + " vs " + show_vec(y); });
        }
      }
    }
    out.push_back(t.result());
  }

  {
    Tally t("auc_trapezoid");
    const std::vector<double> grid_x = {0.0, 0.1, 0.5, 1.0, 2.5};
    for (int mask = 0; mask < 32; ++mask) {
      std::vector<double> xs;
      for (int i = 0; i < 5; ++i) {
        if (mask >> i & 1) xs.push_back(grid_x[i]);
      }
      if (xs.size() < 2) continue;
      int combos = 1;
      for (std::size_t i = 0; i < xs.size(); ++i) combos *= 3;
      for (int cy = 0; cy < combos; ++cy) {
        auto ys = grid_vector(cy, static_cast<int>(xs.size()), 3);
        for (double &y : ys) y = y / 2.0 - 0.5;
        t.check(auc(xs, ys), [&] { return poolforge::auc_trapezoid(xs, ys); },
                [&] { return show_vec(xs) + " / " + show_vec(ys); });
      }
    }
    out.push_back(t.result());
  }

  return out;
}

}  // namespace poolforge::oracle
