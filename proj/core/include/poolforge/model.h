#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "poolforge/corpus.h"

namespace poolforge {

struct TrainConfig {
  double l2_lambda = 1.0;
  double learning_rate = 0.1;
  int max_iters = 500;
  double grad_tolerance = 1e-6;
  bool oversample = true;

  // Throws kInvalidConfig on out-of-range fields.
  void validate() const;
  bool operator==(const TrainConfig &) const = default;
};

struct LabeledExample {
  SparseVector vector;
  int label = 0;
};

struct LabeledSet {
  std::size_t dimension = 0;
  std::vector<LabeledExample> items;

  std::size_t count(int label) const;
};

struct LogisticModel {
  std::vector<double> weights;
  double bias = 0.0;
  TrainConfig config;

  double logit(const SparseVector &x) const { return x.dot(weights) + bias; }
};

// 1 / (1 + exp(-(w.x + b))), evaluated without overflow.
double predict_proba(const LogisticModel &model, const SparseVector &x);
double sigmoid(double z);

// Duplicates minority-class items until both classes have the majority
// count: whole copies first, then a uniform sample (without replacement) of
// the remainder. Original items keep their order; duplicates are appended.
LabeledSet oversample(const LabeledSet &data, std::uint64_t rng_seed);

struct ObjectiveValue {
  double loss = 0.0;
  std::vector<double> weight_gradient;
  double bias_gradient = 0.0;
};

// (NLL + (lambda / 2) * ||w||^2) / n over the n items; the bias is not
// penalized. Same minimizer as the summed form with C = 1 / lambda, but the
// curvature stays bounded as n grows so a fixed step remains stable.
ObjectiveValue logistic_objective(std::span<const double> weights, double bias,
                                  const LabeledSet &data, double l2_lambda);

// Full-batch gradient descent from w = 0, b = 0 with a fixed step. Stops when
// the infinity norm of the gradient drops to grad_tolerance or after
// max_iters steps. If loss_trace is non-null it receives the objective at
// every evaluated iterate.
LogisticModel train(const LabeledSet &data, const TrainConfig &config,
                    std::vector<double> *loss_trace = nullptr);

// train(), preceded by oversample() when config.oversample is set.
LogisticModel fit_relevance_model(const LabeledSet &data,
                                  const TrainConfig &config,
                                  std::uint64_t rng_seed);

// {"weights": [...], "bias": b, "config": {...}}
std::string model_to_json(const LogisticModel &model);
LogisticModel model_from_json(std::string_view text);

std::string train_config_to_json(const TrainConfig &config);
TrainConfig train_config_from_json(std::string_view text);

}  // namespace poolforge
