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

#ifndef APL_METRICS_HPP_
#define APL_METRICS_HPP_

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "apl/errors.hpp"
#include "apl/matrix.hpp"

namespace apl::metrics {

/// Scores and binary truth for B samples over C classes.
struct RankedPredictions {
  Matrix scores;
  LabelMatrix truth;

  RankedPredictions(Matrix s, LabelMatrix t) : scores(std::move(s)), truth(std::move(t)) {
    require_same_shape(scores, truth, "RankedPredictions");
    if (scores.rows() == 0 || scores.cols() == 0) throw InvalidInput("RankedPredictions: empty");
    for (double v : scores.values()) {
      if (!std::isfinite(v)) throw InvalidInput("RankedPredictions: non-finite score");
    }
  }

  std::size_t samples() const noexcept { return scores.rows(); }
  std::size_t classes() const noexcept { return scores.cols(); }
};

/// Indices sorted by descending score; equal scores keep ascending index.
inline std::vector<std::size_t> rank_order(std::span<const double> scores) {
  std::vector<std::size_t> idx(scores.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  return idx;
}

namespace detail {
inline void check_k(int k, std::size_t classes) {
  if (k < 1 || static_cast<std::size_t>(k) > classes) {
    throw InvalidInput("k must lie in [1, " + std::to_string(classes) + "], got " +
                       std::to_string(k));
  }
}
}  // namespace detail

inline double precision_at_k(const RankedPredictions& pred, int k) {
  detail::check_k(k, pred.classes());
  double total = 0.0;
  for (std::size_t s = 0; s < pred.samples(); ++s) {
    const auto order = rank_order(pred.scores.row(s));
    int hits = 0;
    for (int i = 0; i < k; ++i) hits += pred.truth(s, order[i]) ? 1 : 0;
    total += static_cast<double>(hits) / k;
  }
  return total / static_cast<double>(pred.samples());
}

/// Binary-gain nDCG@k with log2(rank + 1) discount. Samples without any
/// relevant label are left out of the mean.
inline double ndcg_at_k(const RankedPredictions& pred, int k) {
  detail::check_k(k, pred.classes());
  double total = 0.0;
  std::size_t counted = 0;
  for (std::size_t s = 0; s < pred.samples(); ++s) {
    const auto truth = pred.truth.row(s);
    const int relevant = static_cast<int>(std::count(truth.begin(), truth.end(), 1));
    if (relevant == 0) continue;
    const auto order = rank_order(pred.scores.row(s));
    double dcg = 0.0;
    for (int i = 0; i < k; ++i) {
      if (truth[order[i]]) dcg += 1.0 / std::log2(i + 2.0);
    }
    double idcg = 0.0;
    for (int i = 0; i < std::min(k, relevant); ++i) idcg += 1.0 / std::log2(i + 2.0);
    total += dcg / idcg;
    ++counted;
  }
  if (counted == 0) throw UndefinedMetric("nDCG: no sample has a relevant label");
  return total / static_cast<double>(counted);
}

/// Average precision of one class, ranking samples by that class's score.
/// Returns NaN when the class has no positive sample.
inline double class_average_precision(const RankedPredictions& pred, std::size_t c) {
  std::vector<double> column(pred.samples());
  for (std::size_t s = 0; s < pred.samples(); ++s) column[s] = pred.scores(s, c);
  const auto order = rank_order(column);
  double sum = 0.0;
  int hits = 0;
  for (std::size_t rank = 0; rank < order.size(); ++rank) {
    if (pred.truth(order[rank], c)) {
      ++hits;
      sum += static_cast<double>(hits) / static_cast<double>(rank + 1);
    }
  }
  return hits == 0 ? std::nan("") : sum / hits;
}

/// Mean over classes (with at least one positive) of per-class AP.
inline double mean_average_precision(const RankedPredictions& pred) {
  double total = 0.0;
  std::size_t counted = 0;
  for (std::size_t c = 0; c < pred.classes(); ++c) {
    const double ap = class_average_precision(pred, c);
    if (std::isnan(ap)) continue;
    total += ap;
    ++counted;
  }
  if (counted == 0) throw UndefinedMetric("mAP: no class has a positive sample");
  return total / static_cast<double>(counted);
}

/// Micro-averaged F1 with score >= threshold predicted positive. With no
/// positives predicted and none present the result is 1.
inline double micro_f1(const RankedPredictions& pred, double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0)) throw InvalidInput("micro_f1: threshold must lie in (0, 1)");
  std::size_t tp = 0, fp = 0, fn = 0;
  auto scores = pred.scores.values();
  auto truth = pred.truth.values();
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const bool predicted = scores[i] >= threshold;
    if (predicted && truth[i]) ++tp;
    if (predicted && !truth[i]) ++fp;
    if (!predicted && truth[i]) ++fn;
  }
  if (tp + fp + fn == 0) return 1.0;
  return 2.0 * tp / static_cast<double>(2 * tp + fp + fn);
}

struct MetricReport {
  std::map<std::string, double> values;
  std::size_t samples = 0;

  double at(const std::string& name) const {
    auto it = values.find(name);
    if (it == values.end()) throw InvalidInput("metric '" + name + "' not in report");
    return it->second;
  }
};

/// {"name": value, ...} with six decimals, keys in lexicographic order.
inline std::string to_json(const MetricReport& report) {
  std::string out = "{";
  bool first = true;
  char buf[64];
  for (const auto& [name, value] : report.values) {
    if (!first) out += ", ";
    first = false;
    std::snprintf(buf, sizeof buf, "%.6f", value);
    out += "\"" + name + "\": " + buf;
  }
  out += "}";
  return out;
}

}  // namespace apl::metrics

#endif  // APL_METRICS_HPP_
