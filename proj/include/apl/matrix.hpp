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

#ifndef APL_MATRIX_HPP_
#define APL_MATRIX_HPP_

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "apl/errors.hpp"

namespace apl {

/// Dense row-major matrix. The tag keeps logits, probabilities and scores
/// from being passed where another kind is expected.
template <typename T, typename Tag>
class BasicMatrix {
 public:
  using value_type = T;

  BasicMatrix() = default;
  BasicMatrix(std::size_t rows, std::size_t cols, T fill = T{})
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  BasicMatrix(std::size_t rows, std::size_t cols, std::vector<T> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) {
      throw ShapeMismatch("matrix data has " + std::to_string(data_.size()) +
                          " entries, expected " + std::to_string(rows_ * cols_));
    }
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }

  T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const T& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<T> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const T> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  std::span<T> values() noexcept { return data_; }
  std::span<const T> values() const noexcept { return data_; }

  template <typename OtherT, typename OtherTag>
  bool same_shape(const BasicMatrix<OtherT, OtherTag>& other) const noexcept {
    return rows_ == other.rows() && cols_ == other.cols();
  }

  friend bool operator==(const BasicMatrix&, const BasicMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

struct LogitTag {};
struct ProbTag {};
struct RealTag {};

/// Raw logits, batch x classes. Finiteness is checked where they are consumed.
using LogitMatrix = BasicMatrix<double, LogitTag>;
/// Plain real matrix: features, weights, gradients, scores.
using Matrix = BasicMatrix<double, RealTag>;

/// Binary targets, batch x classes. Every entry is 0 or 1.
class LabelMatrix {
 public:
  LabelMatrix() = default;
  LabelMatrix(std::size_t rows, std::size_t cols) : m_(rows, cols, 0) {}
  LabelMatrix(std::size_t rows, std::size_t cols, std::vector<std::uint8_t> data)
      : m_(rows, cols, std::move(data)) {
    for (auto y : m_.values()) {
      if (y > 1) throw InvalidInput("label entries must be 0 or 1");
    }
  }

  std::size_t rows() const noexcept { return m_.rows(); }
  std::size_t cols() const noexcept { return m_.cols(); }
  std::size_t size() const noexcept { return m_.size(); }

  bool operator()(std::size_t r, std::size_t c) const { return m_(r, c) != 0; }
  void set(std::size_t r, std::size_t c, bool y) { m_(r, c) = y ? 1 : 0; }

  std::span<const std::uint8_t> row(std::size_t r) const { return m_.row(r); }
  std::span<const std::uint8_t> values() const noexcept { return m_.values(); }

  friend bool operator==(const LabelMatrix&, const LabelMatrix&) = default;

 private:
  struct Tag {};
  BasicMatrix<std::uint8_t, Tag> m_;
};

inline constexpr double kProbEpsilon = 1e-12;

/// Probabilities clamped to [kProbEpsilon, 1 - kProbEpsilon].
class ProbMatrix {
 public:
  ProbMatrix() = default;

  /// Clamps every entry. Throws InvalidInput on NaN or values outside [0, 1].
  static ProbMatrix from_values(std::size_t rows, std::size_t cols, std::vector<double> data) {
    ProbMatrix out;
    out.m_ = BasicMatrix<double, ProbTag>(rows, cols, std::move(data));
    for (double& p : out.m_.values()) {
      if (!(p >= 0.0 && p <= 1.0)) throw InvalidInput("probabilities must lie in [0, 1]");
      p = clamp(p);
    }
    return out;
  }

  static double clamp(double p) noexcept {
    if (p < kProbEpsilon) return kProbEpsilon;
    if (p > 1.0 - kProbEpsilon) return 1.0 - kProbEpsilon;
    return p;
  }

  std::size_t rows() const noexcept { return m_.rows(); }
  std::size_t cols() const noexcept { return m_.cols(); }
  std::size_t size() const noexcept { return m_.size(); }
  double operator()(std::size_t r, std::size_t c) const { return m_(r, c); }
  std::span<const double> row(std::size_t r) const { return m_.row(r); }
  std::span<const double> values() const noexcept { return m_.values(); }

 private:
  BasicMatrix<double, ProbTag> m_;
};

template <typename A, typename B>
void require_same_shape(const A& a, const B& b, const char* where) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ShapeMismatch(std::string(where) + ": shape " + std::to_string(a.rows()) + "x" +
                        std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                        std::to_string(b.cols()));
  }
}

}  // namespace apl

#endif  // APL_MATRIX_HPP_
