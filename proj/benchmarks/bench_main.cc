#include <benchmark/benchmark.h>

#include "poolforge/corpus.h"
#include "poolforge/metrics.h"
#include "poolforge/model.h"
#include "poolforge/rng.h"
#include "poolforge/simulate.h"
#include "poolforge/synth.h"

namespace poolforge {
namespace {

const SyntheticCollection &collection() {
  static const SyntheticCollection c = [] {
    SynthSpec spec;
    spec.num_topics = 4;
    return generate_collection(spec);
  }();
  return c;
}

const VectorStore &vectors() {
  static const VectorStore v = build_vector_store(collection().documents, 15000);
  return v;
}

void BM_Vectorize(benchmark::State &state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_vector_store(collection().documents, 15000));
  }
}
BENCHMARK(BM_Vectorize)->Unit(benchmark::kMillisecond);

void BM_Train(benchmark::State &state) {
  const auto &q = collection().qrels;
  const auto topic = collection().topics[0];
  LabeledSet set;
  set.dimension = vectors().vocabulary.size();
  for (const auto &doc : q.pool(topic)) {
    if (set.items.size() >= static_cast<std::size_t>(state.range(0))) break;
    set.items.push_back({*vectors().find(doc), q.find(topic, doc)->label});
  }
  set.items.push_back({*vectors().find(q.pool(topic).back()), 1});
  set.items.push_back({*vectors().find(q.pool(topic).front()), 0});
  for (auto _ : state) {
    benchmark::DoNotOptimize(fit_relevance_model(set, TrainConfig{}, 1));
  }
}
BENCHMARK(BM_Train)->Arg(20)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_RunTopic(benchmark::State &state) {
  SimulationConfig cfg;
  cfg.strategy = static_cast<SelectionStrategy>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_topic(collection().topics[0],
                                       collection().qrels, nullptr, vectors(),
                                       cfg));
  }
}
BENCHMARK(BM_RunTopic)->DenseRange(0, 2)->Unit(benchmark::kMillisecond);

void BM_Bpref(benchmark::State &state) {
  const auto &q = collection().qrels;
  const auto topic = collection().topics[0];
  const TopicQrels labels = topic_labels(q, topic);
  const auto ranking = ranking_doc_ids(*collection().runs[0].ranking(topic));
  for (auto _ : state) {
    benchmark::DoNotOptimize(bpref(ranking, labels));
    benchmark::DoNotOptimize(average_precision(ranking, labels));
  }
}
BENCHMARK(BM_Bpref);

void BM_KendallTau(benchmark::State &state) {
  Rng rng(1);
  std::map<std::string, double> a, b;
  for (int i = 0; i < state.range(0); ++i) {
    a["s" + std::to_string(i)] = rng.uniform_real();
    b["s" + std::to_string(i)] = rng.uniform_real();
  }
  const auto la = Leaderboard::from_scores(a), lb = Leaderboard::from_scores(b);
  for (auto _ : state) benchmark::DoNotOptimize(kendall_tau(la, lb));
}
BENCHMARK(BM_KendallTau)->Arg(10)->Arg(100);

}  // namespace
}  // namespace poolforge

BENCHMARK_MAIN();
