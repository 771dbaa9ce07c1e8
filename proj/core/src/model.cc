#include "poolforge/model.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "poolforge/error.h"
#include "poolforge/rng.h"

namespace poolforge {

namespace {

using json = nlohmann::json;

void require_both_classes(const LabeledSet &data, ErrorCode code) {
  if (data.count(0) == 0 || data.count(1) == 0) {
    throw Error(code, "training data must contain both classes");
  }
}

json config_json(const TrainConfig &c) {
  return json{{"l2_lambda", c.l2_lambda},
              {"learning_rate", c.learning_rate},
              {"max_iters", c.max_iters},
              {"grad_tolerance", c.grad_tolerance},
              {"oversample", c.oversample}};
}

TrainConfig config_from(const json &j) {
  TrainConfig c;
  c.l2_lambda = j.value("l2_lambda", c.l2_lambda);
  c.learning_rate = j.value("learning_rate", c.learning_rate);
  c.max_iters = j.value("max_iters", c.max_iters);
  c.grad_tolerance = j.value("grad_tolerance", c.grad_tolerance);
  c.oversample = j.value("oversample", c.oversample);
  c.validate();
  return c;
}

}  // namespace

void TrainConfig::validate() const {
  if (!(l2_lambda >= 0.0) || !std::isfinite(l2_lambda)) {
    throw Error(ErrorCode::kInvalidConfig, "l2_lambda must be >= 0");
  }
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw Error(ErrorCode::kInvalidConfig, "learning_rate must be > 0");
  }
  if (max_iters < 1) {
    throw Error(ErrorCode::kInvalidConfig, "max_iters must be >= 1");
  }
  if (!(grad_tolerance > 0.0)) {
    throw Error(ErrorCode::kInvalidConfig, "grad_tolerance must be > 0");
  }
}

std::size_t LabeledSet::count(int label) const {
  return static_cast<std::size_t>(
      std::count_if(items.begin(), items.end(),
                    [label](const auto &it) { return it.label == label; }));
}

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double predict_proba(const LogisticModel &model, const SparseVector &x) {
  return sigmoid(model.logit(x));
}

LabeledSet oversample(const LabeledSet &data, std::uint64_t rng_seed) {
  require_both_classes(data, ErrorCode::kImbalanceUncorrectable);
  const std::size_t rel = data.count(1);
  const std::size_t nonrel = data.count(0);
  LabeledSet out = data;
  if (rel == nonrel) return out;

  const int minority = rel < nonrel ? 1 : 0;
  std::vector<std::size_t> minority_idx;
  for (std::size_t i = 0; i < data.items.size(); ++i) {
    if (data.items[i].label == minority) minority_idx.push_back(i);
  }
  const std::size_t n_min = minority_idx.size();
  const std::size_t deficit = std::max(rel, nonrel) - n_min;
  const std::size_t whole = deficit / n_min;
  const std::size_t remainder = deficit % n_min;

  out.items.reserve(data.items.size() + deficit);
  for (std::size_t round = 0; round < whole; ++round) {
    for (std::size_t i : minority_idx) out.items.push_back(data.items[i]);
  }
  Rng rng(rng_seed);
  auto picks = rng.sample_without_replacement(n_min, remainder);
  std::sort(picks.begin(), picks.end());
  for (std::size_t p : picks) out.items.push_back(data.items[minority_idx[p]]);
  return out;
}

namespace {

// Training items in compressed sparse row form. Items with the same label
// and vector (oversampling makes many) share a row with a multiplicity.
struct Design {
  std::vector<std::size_t> start{0};
  std::vector<std::uint32_t> index;
  std::vector<double> value;
  std::vector<double> label;
  std::vector<double> count;
  double n = 0.0;

  std::size_t rows() const { return label.size(); }
};

std::uint64_t item_hash(const LabeledExample &ex) {
  std::uint64_t h = 1469598103934665603ULL ^ static_cast<std::uint64_t>(ex.label);
  for (const auto &e : ex.vector.entries) {
    std::uint64_t bits;
    std::memcpy(&bits, &e.value, sizeof bits);
    h = (h ^ e.index) * 1099511628211ULL;
    h = (h ^ bits) * 1099511628211ULL;
  }
  return h;
}

// Columns are remapped through `column`, which returns the local index of a
// global feature.
template <class Column>
Design make_design(const LabeledSet &data, Column &&column) {
  Design d;
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> seen;
  std::vector<const LabeledExample *> first;
  for (const auto &ex : data.items) {
    auto &bucket = seen[item_hash(ex)];
    auto same = std::find_if(bucket.begin(), bucket.end(), [&](std::size_t r) {
      return first[r]->label == ex.label && first[r]->vector == ex.vector;
    });
    d.n += 1.0;
    if (same != bucket.end()) {
      d.count[*same] += 1.0;
      continue;
    }
    bucket.push_back(d.rows());
    first.push_back(&ex);
    for (const auto &e : ex.vector.entries) {
      d.index.push_back(column(e.index));
      d.value.push_back(e.value);
    }
    d.start.push_back(d.index.size());
    d.label.push_back(ex.label);
    d.count.push_back(1.0);
  }
  return d;
}

// Adds the data part of the gradient into grad and bias_grad and returns
// the summed NLL. grad must already hold the penalty gradient.
double data_pass(const Design &d, std::span<const double> w, double b,
                 std::span<double> grad, double &bias_grad) {
  const double inv_n = 1.0 / d.n;
  bias_grad = 0.0;
  double nll = 0.0;
  for (std::size_t r = 0; r < d.rows(); ++r) {
    // Four partial sums break the add dependency chain.
    double acc[4] = {0.0, 0.0, 0.0, 0.0};
    std::size_t k = d.start[r];
    for (; k + 4 <= d.start[r + 1]; k += 4) {
      for (int j = 0; j < 4; ++j) acc[j] += d.value[k + j] * w[d.index[k + j]];
    }
    for (; k < d.start[r + 1]; ++k) acc[0] += d.value[k] * w[d.index[k]];
    const double z = b + ((acc[0] + acc[1]) + (acc[2] + acc[3]));
    const double e = std::exp(-std::abs(z));
    const double p = z >= 0.0 ? 1.0 / (1.0 + e) : e / (1.0 + e);
    nll += d.count[r] * (std::max(z, 0.0) + std::log1p(e) - d.label[r] * z);
    const double residual = d.count[r] * (p - d.label[r]) * inv_n;
    bias_grad += residual;
    for (k = d.start[r]; k < d.start[r + 1]; ++k) {
      grad[d.index[k]] += residual * d.value[k];
    }
  }
  return nll;
}

}  // namespace

ObjectiveValue logistic_objective(std::span<const double> weights, double bias,
                                  const LabeledSet &data, double l2_lambda) {
  if (weights.size() != data.dimension) {
    throw Error(ErrorCode::kValidation, "weight dimension mismatch");
  }
  if (data.items.empty()) {
    throw Error(ErrorCode::kValidation, "empty training set");
  }
  const Design d = make_design(data, [&](std::uint32_t j) {
    if (j >= weights.size()) {
      throw Error(ErrorCode::kValidation, "feature index out of range");
    }
    return j;
  });
  ObjectiveValue out;
  out.weight_gradient.resize(weights.size());
  const double inv_n = 1.0 / d.n;
  double sq = 0.0;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    sq += weights[k] * weights[k];
    out.weight_gradient[k] = l2_lambda * inv_n * weights[k];
  }
  const double nll =
      data_pass(d, weights, bias, out.weight_gradient, out.bias_gradient);
  out.loss = (nll + 0.5 * l2_lambda * sq) * inv_n;
  return out;
}

LogisticModel train(const LabeledSet &data, const TrainConfig &config,
                    std::vector<double> *loss_trace) {
  config.validate();
  if (data.items.empty()) {
    throw Error(ErrorCode::kValidation, "empty training set");
  }
  require_both_classes(data, ErrorCode::kValidation);

  // Features absent from the training data keep weight 0 for the whole run
  // (their gradient is lambda * 0), so descend in the compressed space of
  // features that occur and scatter back at the end.
  std::vector<std::uint32_t> global_of_local;
  std::unordered_map<std::uint32_t, std::uint32_t> local_of_global;
  const Design d = make_design(data, [&](std::uint32_t j) {
    if (j >= data.dimension) {
      throw Error(ErrorCode::kValidation, "feature index out of range");
    }
    auto [it, inserted] = local_of_global.try_emplace(
        j, static_cast<std::uint32_t>(global_of_local.size()));
    if (inserted) global_of_local.push_back(j);
    return it->second;
  });

  // Every step moves w inside the span of the training rows, so w = X^T a
  // and the descent runs on the coefficients a with the Gram matrix
  // K = X X^T. u = X w is kept alongside so logits cost nothing extra.
  const std::size_t m = d.rows();
  const double inv_n = 1.0 / d.n;
  const double shrink = config.l2_lambda * inv_n;
  const double lr = config.learning_rate;
  std::vector<double> gram(m * m, 0.0);
  {
    std::vector<std::vector<std::pair<std::uint32_t, double>>> columns(
        global_of_local.size());
    for (std::size_t r = 0; r < m; ++r) {
      for (std::size_t k = d.start[r]; k < d.start[r + 1]; ++k) {
        columns[d.index[k]].emplace_back(static_cast<std::uint32_t>(r),
                                         d.value[k]);
      }
    }
    for (const auto &col : columns) {
      for (const auto &[r1, v1] : col) {
        double *row = &gram[r1 * m];
        for (const auto &[r2, v2] : col) row[r2] += v1 * v2;
      }
    }
  }
  // X^T c in the local feature space.
  auto project = [&](const std::vector<double> &c) {
    std::vector<double> out(global_of_local.size(), 0.0);
    for (std::size_t r = 0; r < m; ++r) {
      for (std::size_t k = d.start[r]; k < d.start[r + 1]; ++k) {
        out[d.index[k]] += c[r] * d.value[k];
      }
    }
    return out;
  };

  const double sqrt_dim =
      std::sqrt(static_cast<double>(std::max<std::size_t>(1, global_of_local.size())));
  std::vector<double> a(m, 0.0), u(m, 0.0), c(m), kc(m);
  double b = 0.0;
  for (int iter = 0;; ++iter) {
    double nll = 0.0, bias_grad = 0.0, sq = 0.0;
    for (std::size_t r = 0; r < m; ++r) {
      const double z = u[r] + b;
      const double e = std::exp(-std::abs(z));
      const double p = z >= 0.0 ? 1.0 / (1.0 + e) : e / (1.0 + e);
      nll += d.count[r] * (std::max(z, 0.0) + std::log1p(e) - d.label[r] * z);
      const double residual = d.count[r] * (p - d.label[r]) * inv_n;
      bias_grad += residual;
      c[r] = residual + shrink * a[r];
      sq += a[r] * u[r];
    }
    const double loss = (nll + 0.5 * config.l2_lambda * sq) * inv_n;
    if (!std::isfinite(loss)) {
      throw Error(ErrorCode::kNumericFailure,
                  "non-finite training loss at iteration " +
                      std::to_string(iter));
    }
    if (loss_trace) loss_trace->push_back(loss);

    // Gradient g = X^T c, so X g = K c and ||g||_2^2 = c . K c.
    std::fill(kc.begin(), kc.end(), 0.0);
    for (std::size_t j = 0; j < m; ++j) {
      const double cj = c[j];
      const double *row = &gram[j * m];
      for (std::size_t i = 0; i < m; ++i) kc[i] += cj * row[i];
    }
    if (iter >= config.max_iters) break;
    double g2 = 0.0;
    for (std::size_t r = 0; r < m; ++r) g2 += c[r] * kc[r];
    // ||g||_inf >= ||g||_2 / sqrt(dim); only near the tolerance is the
    // exact norm needed.
    double gmax = std::max(std::abs(bias_grad), std::sqrt(std::max(g2, 0.0)) / sqrt_dim);
    if (gmax <= config.grad_tolerance) {
      gmax = std::abs(bias_grad);
      for (double g : project(c)) gmax = std::max(gmax, std::abs(g));
      if (gmax <= config.grad_tolerance) break;
    }
    for (std::size_t r = 0; r < m; ++r) {
      a[r] -= lr * c[r];
      u[r] -= lr * kc[r];
    }
    b -= lr * bias_grad;
  }
  const std::vector<double> w = project(a);

  LogisticModel model;
  model.config = config;
  model.bias = b;
  model.weights.assign(data.dimension, 0.0);
  for (std::size_t k = 0; k < w.size(); ++k) {
    model.weights[global_of_local[k]] = w[k];
  }
  return model;
}

LogisticModel fit_relevance_model(const LabeledSet &data,
                                  const TrainConfig &config,
                                  std::uint64_t rng_seed) {
  if (config.oversample) return train(oversample(data, rng_seed), config);
  return train(data, config);
}

std::string model_to_json(const LogisticModel &model) {
  return json{{"weights", model.weights},
              {"bias", model.bias},
              {"config", config_json(model.config)}}
      .dump();
}

LogisticModel model_from_json(std::string_view text) {
  try {
    json j = json::parse(text);
    LogisticModel m;
    m.weights = j.at("weights").get<std::vector<double>>();
    m.bias = j.at("bias").get<double>();
    m.config = config_from(j.at("config"));
    for (double w : m.weights) {
      if (!std::isfinite(w)) {
        throw Error(ErrorCode::kParse, "non-finite weight in checkpoint");
      }
    }
    return m;
  } catch (const json::exception &e) {
    throw Error(ErrorCode::kParse, std::string("bad model checkpoint: ") +
                                       e.what());
  }
}

std::string train_config_to_json(const TrainConfig &config) {
  return config_json(config).dump();
}

TrainConfig train_config_from_json(std::string_view text) {
  try {
    return config_from(json::parse(text));
  } catch (const json::exception &e) {
    throw Error(ErrorCode::kParse, std::string("bad train config: ") +
                                       e.what());
  }
}

}  // namespace poolforge
