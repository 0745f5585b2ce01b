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

#ifndef APL_SYNTH_DATA_HPP_
#define APL_SYNTH_DATA_HPP_

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "apl/errors.hpp"
#include "apl/matrix.hpp"
#include "apl/metrics.hpp"
#include "apl/random.hpp"

namespace apl::synth {

struct DatasetSpec {
  int n_samples = 2000;
  int n_features = 50;
  int n_classes = 20;
  double positive_rate = 0.05;
  double noise_std = 1.0;
  std::uint64_t seed = 0;

  void validate() const {
    if (n_samples < 1 || n_features < 1 || n_classes < 1) {
      throw InvalidParams("dataset counts must be >= 1");
    }
    if (!(positive_rate > 0.0 && positive_rate <= 0.5)) {
      throw InvalidParams("positive_rate must lie in (0, 0.5]");
    }
    if (!(noise_std >= 0.0) || !std::isfinite(noise_std)) {
      throw InvalidParams("noise_std must be finite and >= 0");
    }
  }
};

struct Dataset {
  Matrix features;             // n_samples x n_features
  LabelMatrix labels;          // n_samples x n_classes
  Matrix weights;              // n_features x n_classes, generating weights
  std::vector<double> biases;  // per-class calibrated threshold

  std::size_t samples() const noexcept { return features.rows(); }
  std::size_t feature_count() const noexcept { return features.cols(); }
  std::size_t classes() const noexcept { return labels.cols(); }

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

/// Generating scores x.W / sqrt(F) + noise, no bias, one row per sample.
inline Matrix generating_scores(const Dataset& data) {
  const std::size_t f = data.feature_count(), c = data.classes();
  const double scale = 1.0 / std::sqrt(static_cast<double>(f));
  Matrix scores(data.samples(), c);
  for (std::size_t s = 0; s < data.samples(); ++s) {
    for (std::size_t j = 0; j < f; ++j) {
      const double x = data.features(s, j) * scale;
      for (std::size_t k = 0; k < c; ++k) scores(s, k) += x * data.weights(j, k);
    }
  }
  return scores;
}

/**
 * Draws a multi-label dataset whose per-class positive rate is exactly
 * round(positive_rate * n_samples) / n_samples (at least one positive).
 *
 * Draw order from Rng(seed): the weight matrix row-major, then per sample its
 * n_features features followed by n_classes noise values. Labels mark the
 * top-ranked samples of each class by x.W / sqrt(F) + noise_std * noise, ties
 * going to the lower sample index.
 */
inline Dataset generate(const DatasetSpec& spec) {
  spec.validate();
  const std::size_t n = spec.n_samples, f = spec.n_features, c = spec.n_classes;
  Rng rng(spec.seed);
  Dataset data{Matrix(n, f), LabelMatrix(n, c), Matrix(f, c), std::vector<double>(c)};
  for (double& w : data.weights.values()) w = rng.normal();

  Matrix noise(n, c);
  for (std::size_t s = 0; s < n; ++s) {
    for (double& x : data.features.row(s)) x = rng.normal();
    for (double& e : noise.row(s)) e = spec.noise_std * rng.normal();
  }

  Matrix scores = generating_scores(data);
  for (std::size_t i = 0; i < scores.size(); ++i) scores.values()[i] += noise.values()[i];

  const auto positives = static_cast<std::size_t>(
      std::max(1.0, std::round(spec.positive_rate * static_cast<double>(n))));
  std::vector<double> column(n);
  for (std::size_t k = 0; k < c; ++k) {
    for (std::size_t s = 0; s < n; ++s) column[s] = scores(s, k);
    const auto order = metrics::rank_order(column);
    for (std::size_t r = 0; r < positives; ++r) data.labels.set(order[r], k, true);
    data.biases[k] = column[order[positives - 1]];
  }
  return data;
}

inline double positive_fraction(const LabelMatrix& labels) {
  std::size_t count = 0;
  for (auto y : labels.values()) count += y;
  return static_cast<double>(count) / static_cast<double>(labels.size());
}

/// Rows [0, n_train) and [n_train, n) as two datasets sharing the generating weights.
inline std::pair<Dataset, Dataset> split(const Dataset& data, double validation_fraction) {
  if (!(validation_fraction > 0.0 && validation_fraction < 1.0)) {
    throw InvalidParams("validation_fraction must lie in (0, 1)");
  }
  const std::size_t n = data.samples();
  const auto n_valid = static_cast<std::size_t>(std::round(validation_fraction * n));
  if (n_valid == 0 || n_valid >= n) throw InvalidParams("split leaves an empty part");
  const std::size_t n_train = n - n_valid;
  auto take = [&](std::size_t begin, std::size_t end) {
    const std::size_t rows = end - begin;
    std::vector<double> x(data.features.values().begin() + begin * data.feature_count(),
                          data.features.values().begin() + end * data.feature_count());
    std::vector<std::uint8_t> y(data.labels.values().begin() + begin * data.classes(),
                                data.labels.values().begin() + end * data.classes());
    return Dataset{Matrix(rows, data.feature_count(), std::move(x)),
                   LabelMatrix(rows, data.classes(), std::move(y)), data.weights, data.biases};
  };
  return {take(0, n_train), take(n_train, n)};
}

/// CSV: header f0..f{F-1},y0..y{C-1}, then one sample per line, features at
/// 9 significant digits, labels as 0/1. LF line endings.
inline void write_csv(std::ostream& os, const Dataset& data) {
  for (std::size_t j = 0; j < data.feature_count(); ++j) os << (j ? ",f" : "f") << j;
  for (std::size_t k = 0; k < data.classes(); ++k) os << ",y" << k;
  os << '\n';
  char buf[32];
  for (std::size_t s = 0; s < data.samples(); ++s) {
    for (std::size_t j = 0; j < data.feature_count(); ++j) {
      std::snprintf(buf, sizeof buf, "%.9g", data.features(s, j));
      if (j) os << ',';
      os << buf;
    }
    for (std::size_t k = 0; k < data.classes(); ++k) os << ',' << (data.labels(s, k) ? '1' : '0');
    os << '\n';
  }
}

}  // namespace apl::synth

#endif  // APL_SYNTH_DATA_HPP_
