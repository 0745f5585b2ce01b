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

#ifndef APL_RANDOM_HPP_
#define APL_RANDOM_HPP_

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>

namespace apl {

/// Reproducible random source: std::mt19937_64 (fully specified by the
/// standard) plus distributions implemented here, since the standard library
/// distributions are implementation-defined.
///
///   uniform01  one engine draw: ((x >> 11) + 1) * 2^-53, in (0, 1]
///   normal     two uniform01 draws u1, u2: sqrt(-2 ln u1) cos(2 pi u2)
///   index(n)   one engine draw: x mod n
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform01() { return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53; }

  double normal() {
    const double u1 = uniform01();
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  std::uint64_t index(std::uint64_t n) { return engine_() % n; }

  /// Fisher-Yates, last position first.
  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(index(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace apl

#endif  // APL_RANDOM_HPP_
