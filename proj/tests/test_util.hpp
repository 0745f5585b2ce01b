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

#ifndef APL_TESTS_TEST_UTIL_HPP_
#define APL_TESTS_TEST_UTIL_HPP_

#include <cmath>
#include <cstdint>
#include <vector>

#include "apl/loss.hpp"
#include "apl/random.hpp"

namespace apl::testing {

inline double uniform(Rng& rng, double lo, double hi) { return lo + (hi - lo) * rng.uniform01(); }

/// Random valid parameter set covering the whole family.
inline APLParams random_params(Rng& rng, int trunc_order = 200) {
  return APLCoefficients{.alpha1 = uniform(rng, 0.0, 3.0),
                         .alpha2 = uniform(rng, 0.0, 3.0),
                         .beta1 = uniform(rng, 0.0, 3.0),
                         .gamma_plus = uniform(rng, 0.0, 4.0),
                         .gamma_minus = uniform(rng, 0.0, 4.0),
                         .p_th = uniform(rng, 0.0, 0.3),
                         .trunc_order = trunc_order};
}

/// Straight transcription of the closed form, independent of the library's
/// factoring (log instead of log1p, pow for every power).
inline double reference_entry_loss(double p, bool y, const APLParams& a) {
  if (y) {
    const double q = 1.0 - p;
    return std::pow(q, a.gamma_plus()) *
           (-std::log(p) + (a.alpha1() - 1.0) * q + (a.alpha2() - 0.5) * std::pow(q, 2));
  }
  const double r = std::max(p - a.p_th(), 0.0);
  return std::pow(r, a.gamma_minus()) * (-std::log(1.0 - r) + (a.beta1() - 1.0) * r);
}

}  // namespace apl::testing

#endif  // APL_TESTS_TEST_UTIL_HPP_
