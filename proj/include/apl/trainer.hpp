/*
 * Copyright 2026 The APL Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef APL_TRAINER_HPP_
#define APL_TRAINER_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numeric>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "apl/errors.hpp"
#include "apl/loss.hpp"
#include "apl/matrix.hpp"
#include "apl/metrics.hpp"
#include "apl/random.hpp"
#include "apl/synth_data.hpp"

namespace apl::train {

enum class ModelKind { linear, mlp1 };

struct ModelSpec {
  ModelKind kind = ModelKind::linear;
  int hidden_size = 32;
  double init_scale = 0.01;
  std::uint64_t seed = 0;

  void validate() const {
    if (kind == ModelKind::mlp1 && hidden_size < 1) throw InvalidParams("hidden_size must be >= 1");
    if (!std::isfinite(init_scale) || init_scale < 0.0) throw InvalidParams("init_scale must be >= 0");
  }
};

struct OptSpec {
  double learning_rate = 0.5;
  double momentum = 0.9;
  int epochs = 30;
  int batch_size = 64;

  void validate() const {
    if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
      throw InvalidParams("learning_rate must be finite and >= 0");
    }
    if (!(momentum >= 0.0 && momentum < 1.0)) throw InvalidParams("momentum must lie in [0, 1)");
    if (epochs < 1) throw InvalidParams("epochs must be >= 1");
    if (batch_size < 1) throw InvalidParams("batch_size must be >= 1");
  }
};

/**
 * Flat parameter vector.
 *
 * linear: W[F x C] row-major, then b[C].
 * mlp1:   W1[F x H], b1[H], W2[H x C], b2[C]; hidden activation tanh.
 */
struct ModelParams {
  ModelKind kind = ModelKind::linear;
  std::size_t n_features = 0;
  std::size_t hidden = 0;
  std::size_t n_classes = 0;
  std::vector<double> values;

  static std::size_t count(ModelKind kind, std::size_t f, std::size_t h, std::size_t c) {
    return kind == ModelKind::linear ? f * c + c : f * h + h + h * c + c;
  }

  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

/// Weights ~ normal(0, init_scale) in layout order from Rng(spec.seed); biases 0.
inline ModelParams init_model(const ModelSpec& spec, std::size_t n_features, std::size_t n_classes) {
  spec.validate();
  ModelParams m;
  m.kind = spec.kind;
  m.n_features = n_features;
  m.hidden = spec.kind == ModelKind::mlp1 ? static_cast<std::size_t>(spec.hidden_size) : 0;
  m.n_classes = n_classes;
  m.values.assign(ModelParams::count(m.kind, n_features, m.hidden, n_classes), 0.0);
  Rng rng(spec.seed);
  auto fill = [&](std::size_t offset, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) m.values[offset + i] = rng.normal(0.0, spec.init_scale);
  };
  if (m.kind == ModelKind::linear) {
    fill(0, n_features * n_classes);
  } else {
    const std::size_t h = m.hidden;
    fill(0, n_features * h);
    fill(n_features * h + h, h * n_classes);
  }
  return m;
}

namespace detail {

// out[s, k] = b[k] + sum_j in[s, j] w[j, k]
inline void affine(const double* in, std::size_t rows, std::size_t in_dim, const double* w,
                   const double* b, std::size_t out_dim, double* out) {
  for (std::size_t s = 0; s < rows; ++s) {
    double* o = out + s * out_dim;
    std::copy(b, b + out_dim, o);
    for (std::size_t j = 0; j < in_dim; ++j) {
      const double x = in[s * in_dim + j];
      const double* wr = w + j * out_dim;
      for (std::size_t k = 0; k < out_dim; ++k) o[k] += x * wr[k];
    }
  }
}

// gw[j, k] += sum_s in[s, j] d[s, k];  gb[k] += sum_s d[s, k]
inline void affine_grad(const double* in, std::size_t rows, std::size_t in_dim, const double* d,
                        std::size_t out_dim, double* gw, double* gb) {
  for (std::size_t s = 0; s < rows; ++s) {
    const double* dr = d + s * out_dim;
    for (std::size_t j = 0; j < in_dim; ++j) {
      const double x = in[s * in_dim + j];
      double* g = gw + j * out_dim;
      for (std::size_t k = 0; k < out_dim; ++k) g[k] += x * dr[k];
    }
    for (std::size_t k = 0; k < out_dim; ++k) gb[k] += dr[k];
  }
}

}  // namespace detail

/// Hidden activations (mlp1 only) and output logits of a forward pass.
struct ForwardCache {
  Matrix hidden;
  LogitMatrix logits;
};

inline ForwardCache forward(const ModelParams& m, const Matrix& x) {
  if (x.cols() != m.n_features) {
    throw ShapeMismatch("forward: input has " + std::to_string(x.cols()) + " features, model expects " +
                        std::to_string(m.n_features));
  }
  const std::size_t rows = x.rows(), f = m.n_features, c = m.n_classes;
  ForwardCache out{Matrix(), LogitMatrix(rows, c)};
  const double* p = m.values.data();
  if (m.kind == ModelKind::linear) {
    detail::affine(x.values().data(), rows, f, p, p + f * c, c, out.logits.values().data());
  } else {
    const std::size_t h = m.hidden;
    out.hidden = Matrix(rows, h);
    detail::affine(x.values().data(), rows, f, p, p + f * h, h, out.hidden.values().data());
    for (double& v : out.hidden.values()) v = std::tanh(v);
    const double* p2 = p + f * h + h;
    detail::affine(out.hidden.values().data(), rows, h, p2, p2 + h * c, c,
                   out.logits.values().data());
  }
  return out;
}

/// Gradient of the loss with respect to the flat parameters, given dL/dlogits.
inline std::vector<double> backward(const ModelParams& m, const Matrix& x, const ForwardCache& cache,
                                    const Matrix& dlogits) {
  const std::size_t rows = x.rows(), f = m.n_features, c = m.n_classes;
  std::vector<double> g(m.values.size(), 0.0);
  if (m.kind == ModelKind::linear) {
    detail::affine_grad(x.values().data(), rows, f, dlogits.values().data(), c, g.data(), g.data() + f * c);
    return g;
  }
  const std::size_t h = m.hidden;
  double* g1 = g.data();
  double* g2 = g.data() + f * h + h;
  detail::affine_grad(cache.hidden.values().data(), rows, h, dlogits.values().data(), c, g2, g2 + h * c);
  const double* w2 = m.values.data() + f * h + h;
  Matrix dz(rows, h);
  for (std::size_t s = 0; s < rows; ++s) {
    for (std::size_t j = 0; j < h; ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < c; ++k) acc += dlogits(s, k) * w2[j * c + k];
      const double a = cache.hidden(s, j);
      dz(s, j) = acc * (1.0 - a * a);
    }
  }
  detail::affine_grad(x.values().data(), rows, f, dz.values().data(), h, g1, g1 + f * h);
  return g;
}

inline double dataset_loss(const ModelParams& m, const synth::Dataset& data, const APLParams& loss) {
  return apl_forward_backward(forward(m, data.features).logits, data.labels, loss).value;
}

/// P@k and nDCG@k for every k, mAP, and micro-F1 at 0.5 on sigmoid scores.
inline metrics::MetricReport evaluate(const ModelParams& m, const synth::Dataset& data,
                                      const std::vector<int>& ks) {
  if (data.classes() != m.n_classes) throw ShapeMismatch("evaluate: class count mismatch");
  const auto logits = forward(m, data.features).logits;
  Matrix scores(logits.rows(), logits.cols());
  for (std::size_t i = 0; i < scores.size(); ++i) scores.values()[i] = sigmoid(logits.values()[i]);
  const metrics::RankedPredictions pred(std::move(scores), data.labels);
  metrics::MetricReport report;
  report.samples = data.samples();
  for (int k : ks) {
    report.values["P@" + std::to_string(k)] = metrics::precision_at_k(pred, k);
    report.values["nDCG@" + std::to_string(k)] = metrics::ndcg_at_k(pred, k);
  }
  report.values["mAP"] = metrics::mean_average_precision(pred);
  report.values["micro_F1"] = metrics::micro_f1(pred, 0.5);
  return report;
}

struct TrainHistory {
  double initial_loss = 0.0;
  std::vector<double> train_loss;                    // full training-set loss after each epoch
  std::vector<metrics::MetricReport> validation;     // after each epoch
  ModelParams final_params;
};

/**
 * Minibatch gradient descent with momentum:
 *   v <- momentum * v - learning_rate * g;  theta <- theta + v.
 * The sample order is reshuffled every epoch from Rng(model.seed ^ kShuffleSalt).
 * Metrics are computed on `validation` (the training set when absent).
 * Throws Divergence when a loss or parameter becomes non-finite.
 */
inline TrainHistory train(const ModelSpec& model, const synth::Dataset& data, const APLParams& loss,
                          const OptSpec& opt, const std::vector<int>& ks = {1, 3, 5},
                          const synth::Dataset* validation = nullptr) {
  constexpr std::uint64_t kShuffleSalt = 0x9E3779B97F4A7C15ULL;
  opt.validate();
  const synth::Dataset& eval_set = validation ? *validation : data;
  if (eval_set.feature_count() != data.feature_count() || eval_set.classes() != data.classes()) {
    throw ShapeMismatch("train: validation set dimensions differ from training set");
  }

  TrainHistory hist;
  ModelParams params = init_model(model, data.feature_count(), data.classes());
  std::vector<double> velocity(params.values.size(), 0.0);
  Rng shuffler(model.seed ^ kShuffleSalt);
  std::vector<std::size_t> order(data.samples());
  std::iota(order.begin(), order.end(), std::size_t{0});

  auto checked_loss = [&](int epoch) {
    double v;
    try {
      v = dataset_loss(params, data, loss);
    } catch (const InvalidInput&) {
      throw Divergence(epoch, "non-finite logits at epoch " + std::to_string(epoch));
    }
    if (!std::isfinite(v)) throw Divergence(epoch, "non-finite loss at epoch " + std::to_string(epoch));
    return v;
  };
  hist.initial_loss = checked_loss(0);

  const std::size_t f = data.feature_count(), c = data.classes();
  const auto batch = static_cast<std::size_t>(opt.batch_size);
  for (int epoch = 1; epoch <= opt.epochs; ++epoch) {
    shuffler.shuffle(std::span<std::size_t>(order));
    for (std::size_t start = 0; start < order.size(); start += batch) {
      const std::size_t rows = std::min(batch, order.size() - start);
      Matrix xb(rows, f);
      LabelMatrix yb(rows, c);
      for (std::size_t r = 0; r < rows; ++r) {
        const std::size_t s = order[start + r];
        std::copy(data.features.row(s).begin(), data.features.row(s).end(), xb.row(r).begin());
        for (std::size_t k = 0; k < c; ++k) yb.set(r, k, data.labels(s, k));
      }
      const auto cache = forward(params, xb);
      LossOutput out;
      try {
        out = apl_forward_backward(cache.logits, yb, loss);
      } catch (const InvalidInput&) {
        throw Divergence(epoch, "non-finite logits at epoch " + std::to_string(epoch));
      }
      const auto grad = backward(params, xb, cache, out.grad);
      for (std::size_t i = 0; i < params.values.size(); ++i) {
        velocity[i] = opt.momentum * velocity[i] - opt.learning_rate * grad[i];
        params.values[i] += velocity[i];
      }
    }
    for (double v : params.values) {
      if (!std::isfinite(v)) throw Divergence(epoch, "non-finite parameter at epoch " + std::to_string(epoch));
    }
    hist.train_loss.push_back(checked_loss(epoch));
    hist.validation.push_back(evaluate(params, eval_set, ks));
  }
  hist.final_params = std::move(params);
  return hist;
}

/// One JSON object per epoch: {"epoch": e, "train_loss": ..., <metric>: ...}.
/// `prefix` is inserted verbatim after the opening brace (e.g. "\"seed\": 3, ").
inline void write_history_jsonl(std::ostream& os, const TrainHistory& hist, const std::string& prefix = "") {
  char buf[64];
  for (std::size_t e = 0; e < hist.train_loss.size(); ++e) {
    std::snprintf(buf, sizeof buf, "%.9g", hist.train_loss[e]);
    os << "{" << prefix << "\"epoch\": " << (e + 1) << ", \"train_loss\": " << buf;
    for (const auto& [name, value] : hist.validation[e].values) {
      std::snprintf(buf, sizeof buf, "%.6f", value);
      os << ", \"" << name << "\": " << buf;
    }
    os << "}\n";
  }
}

struct AuditOptions {
  int batch = 4;
  int classes = 6;
  double logit_scale = 3.0;
  double step = 1e-5;
  double kink_exclusion = 1e-3;
  double denom_floor = 1e-12;
  bool all_positive = false;
};

struct AuditReport {
  double max_rel_error = 0.0;
  std::size_t checked = 0;
  std::size_t skipped = 0;
};

/**
 * Compares apl_forward_backward's gradient against central differences of its
 * value. Each entry is differenced on its own 1x1 evaluation, then scaled by
 * 1/(B*C), so round-off stays proportional to that entry's loss. Relative error
 * is |a - n| / max(|a|, |n|, denom_floor). Entries with |p - p_th| below
 * kink_exclusion are skipped.
 */
inline AuditReport finite_difference_audit(const APLParams& loss, int trials, std::uint64_t seed,
                                           const AuditOptions& opts = {}) {
  if (trials < 1) throw InvalidParams("trials must be >= 1");
  Rng rng(seed);
  AuditReport report;
  const std::size_t b = opts.batch, c = opts.classes;
  const double n = static_cast<double>(b * c);
  for (int t = 0; t < trials; ++t) {
    LogitMatrix logits(b, c);
    LabelMatrix labels(b, c);
    for (double& l : logits.values()) l = opts.logit_scale * rng.normal();
    for (std::size_t r = 0; r < b; ++r) {
      for (std::size_t k = 0; k < c; ++k) labels.set(r, k, opts.all_positive || rng.uniform01() < 0.5);
    }
    const LossOutput analytic = apl_forward_backward(logits, labels, loss);
    for (std::size_t r = 0; r < b; ++r) {
      for (std::size_t k = 0; k < c; ++k) {
        const double l = logits(r, k);
        if (std::abs(sigmoid(l) - loss.p_th()) < opts.kink_exclusion) {
          ++report.skipped;
          continue;
        }
        LabelMatrix y(1, 1);
        y.set(0, 0, labels(r, k));
        auto value_at = [&](double x) {
          return apl_forward_backward(LogitMatrix(1, 1, x), y, loss).value;
        };
        const double numeric = (value_at(l + opts.step) - value_at(l - opts.step)) / (2.0 * opts.step) / n;
        const double a = analytic.grad(r, k);
        const double denom = std::max({std::abs(a), std::abs(numeric), opts.denom_floor / n});
        report.max_rel_error = std::max(report.max_rel_error, std::abs(a - numeric) / denom);
        ++report.checked;
      }
    }
  }
  return report;
}

}  // namespace apl::train

#endif  // APL_TRAINER_HPP_
