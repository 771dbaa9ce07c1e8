#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace poolforge {

// Seed splitting rule. Every random stream in the toolkit is keyed by the
// top-level seed plus a (scope, purpose, index) triple:
//
//   key  = fnv1a64(scope + '\x1f' + purpose)
//   seed = splitmix64(splitmix64(base ^ key) + index)
//
// scope is normally a topic id ("" for collection-wide streams), purpose a
// fixed tag such as "seed_is" or "select", and index a counter that
// distinguishes repeated draws (e.g. the number of judgments so far).
std::uint64_t fnv1a64(std::string_view text);
std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t derive_seed(std::uint64_t base, std::string_view scope,
                          std::string_view purpose, std::uint64_t index = 0);

// Portable generator: the engine is fully specified by the standard and the
// distributions below are implemented here, so streams are identical across
// standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform in [0, n), n > 0; rejection sampling, no modulo bias.
  std::uint64_t uniform_index(std::uint64_t n);

  // Uniform in [0, 1) with 53 random bits.
  double uniform_real();

  // Standard normal via Box-Muller.
  double normal();

  // k distinct indices from [0, n) in draw order (partial Fisher-Yates).
  std::vector<std::size_t> sample_without_replacement(std::size_t n,
                                                      std::size_t k);

  template <typename T>
  void shuffle(std::vector<T> &items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::size_t j = uniform_index(i);
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace poolforge
