#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "poolforge/corpus.h"

namespace poolforge {

// Desk-scale test collection generator. Every topic owns a pool of
// documents that all mention the query terms. Relevant documents each
// discuss one facet of the topic, facets are unevenly popular, and the
// facet share varies per document, so some relevant documents are hard
// to tell from the rest. Non-relevant documents talk about an off-topic
// distractor facet and leak a little relevant vocabulary.
struct SynthSpec {
  int num_topics = 50;
  int pool_size = 200;
  // Target prevalence per topic, assigned round-robin over topics.
  std::vector<double> prevalences = {0.054};
  // Per-topic prevalence drawn uniformly from target +- jitter.
  double prevalence_jitter = 0.0;

  int background_vocab = 4000;
  int query_vocab = 8;           // query terms shared by the whole pool
  double query_strength = 0.05;  // query-term share in every pooled doc
  int num_facets = 4;            // relevant facets per topic
  int num_distractors = 4;       // off-topic facets per topic
  int signal_vocab = 20;         // terms per facet
  // Mean facet-term shares. The share of each document is uniform on
  // strength * [1 - spread, 1 + spread].
  double signal_strength = 0.08;  // relevant docs, own facet
  double noise_strength = 0.02;   // non-relevant docs, relevant facets
  double signal_spread = 1.0;
  int doc_length_min = 40;
  int doc_length_max = 120;

  int num_systems = 30;
  // Probability that a system orders a (relevant, non-relevant) pair
  // correctly; systems are spread linearly between the two.
  double quality_min = 0.60;
  double quality_max = 0.90;
  double topic_quality_noise = 0.25;
  int foreign_docs = 5;  // unjudged documents mixed into each ranking

  std::uint64_t rng_seed = 1;

  void validate() const;
};

struct SyntheticCollection {
  std::vector<std::string> topics;
  std::vector<Document> documents;
  Qrels qrels;
  std::vector<SystemRun> runs;
};

SyntheticCollection generate_collection(const SynthSpec &spec);

// corpus.jsonl, qrels.txt and runs/<system>.run under dir.
void write_collection(const SyntheticCollection &collection,
                      const std::filesystem::path &dir);

// Inverse standard normal CDF, by bisection on erfc.
double normal_quantile(double p);

}  // namespace poolforge
