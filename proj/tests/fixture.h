#pragma once

#include "poolforge/corpus.h"
#include "poolforge/synth.h"

namespace poolforge {

struct Fixture {
  SyntheticCollection collection;
  VectorStore vectors;
};

inline SynthSpec small_spec(int topics = 4, int pool = 60,
                            std::vector<double> prevalences = {0.2, 0.3}) {
  SynthSpec s;
  s.num_topics = topics;
  s.pool_size = pool;
  s.prevalences = std::move(prevalences);
  s.background_vocab = 600;
  s.num_systems = 5;
  s.rng_seed = 17;
  return s;
}

inline Fixture make_fixture(const SynthSpec &spec = small_spec()) {
  Fixture f;
  f.collection = generate_collection(spec);
  f.vectors = build_vector_store(f.collection.documents, 15000);
  return f;
}

}  // namespace poolforge
