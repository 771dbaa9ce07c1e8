#include "poolforge/synth.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "poolforge/error.h"
#include "poolforge/io.h"
#include "poolforge/rng.h"

namespace poolforge {

namespace {

// Zipf(1) sampler over n ranks.
class ZipfSampler {
 public:
  explicit ZipfSampler(int n) : cdf_(n) {
    double total = 0.0;
    for (int k = 0; k < n; ++k) {
      total += 1.0 / (k + 1);
      cdf_[k] = total;
    }
    for (double &c : cdf_) c /= total;
  }

  int sample(Rng &rng) const {
    const double u = rng.uniform_real();
    auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    return static_cast<int>(std::min<std::ptrdiff_t>(
        it - cdf_.begin(), static_cast<std::ptrdiff_t>(cdf_.size()) - 1));
  }

 private:
  std::vector<double> cdf_;
};

std::string pad(int value, int width) {
  std::string s = std::to_string(value);
  if (static_cast<int>(s.size()) < width) s.insert(0, width - s.size(), '0');
  return s;
}

}  // namespace

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw Error(ErrorCode::kDomain, "quantile needs p in (0, 1)");
  }
  double lo = -40.0, hi = 40.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double cdf = 0.5 * std::erfc(-mid / std::numbers::sqrt2);
    (cdf < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

void SynthSpec::validate() const {
  auto fail = [](const std::string &msg) {
    throw Error(ErrorCode::kInvalidConfig, "synth: " + msg);
  };
  if (num_topics < 1) fail("num_topics must be >= 1");
  if (pool_size < 2) fail("pool_size must be >= 2");
  if (prevalences.empty()) fail("need at least one prevalence");
  for (double p : prevalences) {
    if (!(p >= 0.0 && p <= 1.0)) fail("prevalence must be in [0, 1]");
  }
  if (!(prevalence_jitter >= 0.0)) fail("prevalence_jitter must be >= 0");
  if (background_vocab < 1 || query_vocab < 1 || signal_vocab < 1) {
    fail("vocab sizes must be >= 1");
  }
  if (num_facets < 1 || num_distractors < 1) {
    fail("num_facets and num_distractors must be >= 1");
  }
  for (double v : {query_strength, signal_strength, noise_strength}) {
    if (!(v >= 0.0 && v <= 0.25)) fail("term shares must be in [0, 0.25]");
  }
  if (!(signal_spread >= 0.0 && signal_spread <= 1.0)) {
    fail("signal_spread must be in [0, 1]");
  }
  if (doc_length_min < 1 || doc_length_max < doc_length_min) {
    fail("bad document length range");
  }
  if (num_systems < 2) fail("num_systems must be >= 2");
  if (!(quality_min > 0.0 && quality_max < 1.0 && quality_min <= quality_max)) {
    fail("qualities must satisfy 0 < min <= max < 1");
  }
  if (!(topic_quality_noise >= 0.0)) fail("topic_quality_noise must be >= 0");
  if (foreign_docs < 0) fail("foreign_docs must be >= 0");
}

SyntheticCollection generate_collection(const SynthSpec &spec) {
  spec.validate();
  SyntheticCollection out;
  const ZipfSampler background(spec.background_vocab);
  const ZipfSampler query(spec.query_vocab);
  const ZipfSampler facet_terms(spec.signal_vocab);
  const ZipfSampler facets(spec.num_facets);
  const ZipfSampler distractors(spec.num_distractors);

  std::vector<std::vector<std::string>> pools(spec.num_topics);
  std::vector<std::vector<int>> labels(spec.num_topics);
  for (int t = 0; t < spec.num_topics; ++t) {
    const std::string topic = "t" + pad(t + 1, 3);
    out.topics.push_back(topic);
    Rng rng(derive_seed(spec.rng_seed, topic, "documents"));

    double prevalence = spec.prevalences[t % spec.prevalences.size()];
    if (spec.prevalence_jitter > 0.0) {
      prevalence += spec.prevalence_jitter * (2.0 * rng.uniform_real() - 1.0);
      prevalence = std::clamp(prevalence, 0.0, 1.0);
    }
    const int num_rel = static_cast<int>(
        std::lround(prevalence * static_cast<double>(spec.pool_size)));
    std::vector<int> topic_labels(spec.pool_size, 0);
    std::fill(topic_labels.begin(), topic_labels.begin() + num_rel, 1);
    rng.shuffle(topic_labels);

    auto facet_term = [&](char kind, int facet) {
      return topic + kind + std::to_string(facet + 1) + "x" +
             std::to_string(facet_terms.sample(rng) + 1);
    };
    for (int d = 0; d < spec.pool_size; ++d) {
      const std::string doc_id = topic + "-d" + pad(d + 1, 4);
      const bool rel = topic_labels[d] != 0;
      const int own = rel ? facets.sample(rng) : distractors.sample(rng);
      auto share = [&](double strength) {
        return strength *
               (1.0 + spec.signal_spread * (2.0 * rng.uniform_real() - 1.0));
      };
      const double own_share = share(spec.signal_strength);
      const double leak_share = rel ? 0.0 : share(spec.noise_strength);
      const int len = spec.doc_length_min +
                      static_cast<int>(rng.uniform_index(
                          spec.doc_length_max - spec.doc_length_min + 1));
      std::string text;
      for (int k = 0; k < len; ++k) {
        if (k) text.push_back(' ');
        double u = rng.uniform_real();
        if ((u -= spec.query_strength) < 0.0) {
          text += topic + "q" + std::to_string(query.sample(rng) + 1);
        } else if ((u -= own_share) < 0.0) {
          text += facet_term(rel ? 'f' : 'z', own);
        } else if ((u -= leak_share) < 0.0) {
          text += facet_term('f', facets.sample(rng));
        } else {
          text += "w" + std::to_string(background.sample(rng) + 1);
        }
      }
      out.documents.push_back({doc_id, std::move(text)});
      out.qrels.set(topic, doc_id, topic_labels[d]);
      pools[t].push_back(doc_id);
    }
    labels[t] = std::move(topic_labels);
  }

  const int width = spec.num_systems >= 100 ? 3 : 2;
  for (int s = 0; s < spec.num_systems; ++s) {
    SystemRun run;
    run.system_id = "sys" + pad(s + 1, width);
    const double q =
        spec.quality_max - (spec.quality_max - spec.quality_min) * s /
                               std::max(1, spec.num_systems - 1);
    // P(rel score > nonrel score) = Phi(mu / sqrt 2) = q.
    const double mu = std::numbers::sqrt2 * normal_quantile(q);
    for (int t = 0; t < spec.num_topics; ++t) {
      const std::string &topic = out.topics[t];
      Rng rng(derive_seed(spec.rng_seed, topic, "run", s));
      const double topic_mu = mu + spec.topic_quality_noise * rng.normal();
      std::vector<RankedDoc> ranked;
      for (int d = 0; d < spec.pool_size; ++d) {
        const double score =
            (labels[t][d] ? topic_mu : 0.0) + rng.normal();
        ranked.push_back({pools[t][d], score});
      }
      if (spec.num_topics > 1) {
        for (int f = 0; f < spec.foreign_docs; ++f) {
          int other = static_cast<int>(rng.uniform_index(spec.num_topics - 1));
          if (other >= t) ++other;
          const auto &doc =
              pools[other][rng.uniform_index(pools[other].size())];
          if (std::none_of(ranked.begin(), ranked.end(),
                           [&](const auto &r) { return r.doc_id == doc; })) {
            ranked.push_back({doc, rng.normal()});
          }
        }
      }
      std::stable_sort(ranked.begin(), ranked.end(),
                       [](const RankedDoc &a, const RankedDoc &b) {
                         if (a.score != b.score) return a.score > b.score;
                         return a.doc_id > b.doc_id;
                       });
      run.rankings[topic] = std::move(ranked);
    }
    out.runs.push_back(std::move(run));
  }
  return out;
}

void write_collection(const SyntheticCollection &collection,
                      const std::filesystem::path &dir) {
  std::ostringstream corpus;
  write_corpus(corpus, collection.documents);
  atomic_write_file(dir / "corpus.jsonl", corpus.str());

  std::ostringstream qrels;
  write_qrels(qrels, collection.qrels, QrelsFormat::kTrec);
  atomic_write_file(dir / "qrels.txt", qrels.str());

  std::filesystem::create_directories(dir / "runs");
  for (const auto &run : collection.runs) {
    std::ostringstream text;
    write_run(text, run);
    atomic_write_file(dir / "runs" / (run.system_id + ".run"), text.str());
  }
}

}  // namespace poolforge
