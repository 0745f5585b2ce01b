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

#ifndef APL_ANALYSIS_HPP_
#define APL_ANALYSIS_HPP_

#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "apl/errors.hpp"
#include "apl/loss.hpp"

namespace apl::analysis {

/// -dL+/dp for a positive entry.
///
/// With gamma_plus = 0 this is alpha1 + 2 alpha2 (1-p) + (1-p)^2/p, the last
/// term being the summed tail sum_{j>=2} (1-p)^j. For gamma_plus > 0 the
/// focused closed form is differentiated directly.
inline double positive_gradient(double p, const APLParams& params) {
  if (!(p > 0.0 && p < 1.0)) throw InvalidInput("positive_gradient: p must lie in (0, 1)");
  const double q = 1.0 - p;
  const double a1 = params.alpha1();
  const double a2 = params.alpha2();
  const double gp = params.gamma_plus();
  if (gp == 0.0) return a1 + 2.0 * a2 * q + q * q / p;
  const double poly = -std::log(p) + (a1 - 1.0) * q + (a2 - 0.5) * q * q;
  const double dpoly = 1.0 / p + (a1 - 1.0) + (2.0 * a2 - 1.0) * q;
  return gp * std::pow(q, gp - 1.0) * poly + std::pow(q, gp) * dpoly;
}

namespace detail {

// -log(1-r)/r, accurate for small r.
inline double neg_log1m_over(double r) { return -std::log1p(-r) / r; }

// d/dr of -log(1-r)/r = (r/(1-r) + log(1-r))/r^2 = sum_{k>=2} (1-1/k) r^(k-2).
inline double d_neg_log1m_over(double r) {
  if (r < 1e-3) {
    double sum = 0.0;
    double power = 1.0;
    for (int k = 2; k < 10; ++k) {
      sum += (1.0 - 1.0 / k) * power;
      power *= r;
    }
    return sum;
  }
  return (r / (1.0 - r) + std::log1p(-r)) / (r * r);
}

// Bracket term 1/(1-r) - gamma log(1-r)/r + (beta1-1)(gamma+1).
inline double bracket(double r, double gm, double b1) {
  return 1.0 / (1.0 - r) + gm * neg_log1m_over(r) + (b1 - 1.0) * (gm + 1.0);
}

inline double d_bracket(double r, double gm) {
  return 1.0 / ((1.0 - r) * (1.0 - r)) + gm * d_neg_log1m_over(r);
}

}  // namespace detail

/// dL-/dl for a negative entry:
///   p (1-p) r^gm [1/(1-r) - gm log(1-r)/r + (beta1-1)(gm+1)],  r = max(p - p_th, 0).
/// Zero in the dead zone p <= p_th.
inline double negative_gradient_wrt_logit(double p, const APLParams& params) {
  if (!(p > 0.0 && p < 1.0)) throw InvalidInput("negative_gradient_wrt_logit: p must lie in (0, 1)");
  if (p <= params.p_th()) return 0.0;
  const double r = p - params.p_th();
  const double gm = params.gamma_minus();
  return p * (1.0 - p) * focus_pow(r, gm) * detail::bracket(r, gm, params.beta1());
}

/// d/dp of negative_gradient_wrt_logit, analytic. Zero in the dead zone.
inline double negative_gradient_slope(double p, const APLParams& params) {
  if (p <= params.p_th()) return 0.0;
  const double r = p - params.p_th();
  const double gm = params.gamma_minus();
  const double k = detail::bracket(r, gm, params.beta1());
  const double dk = detail::d_bracket(r, gm);
  const double pq = p * (1.0 - p);
  double d_focus = 0.0;  // d(r^gm)/dr
  if (gm != 0.0) d_focus = gm * std::pow(r, gm - 1.0);
  return (1.0 - 2.0 * p) * focus_pow(r, gm) * k + pq * (d_focus * k + focus_pow(r, gm) * dk);
}

/// Stationary point of the negative-class logit gradient.
struct CriticalPoint {
  double p_star = 0.0;
  double residual = 0.0;  // negative_gradient_slope at p_star
  std::pair<double, double> bracket;
};

struct PStarOptions {
  int scan_points = 10000;
  double edge = 1e-6;           // scan on [p_th + edge, 1 - edge]
  double tolerance = 1e-10;     // final bracket width
};

/// Locates p*, the largest root of the slope of the negative-class logit
/// gradient, by a uniform scan for sign changes followed by bisection.
/// Throws NoCriticalPoint when the scan sees no sign change.
inline CriticalPoint find_pstar(const APLParams& params, const PStarOptions& opts = {}) {
  const double lo_edge = params.p_th() + opts.edge;
  const double hi_edge = 1.0 - opts.edge;
  if (!(lo_edge < hi_edge) || opts.scan_points < 2) {
    throw InvalidInput("find_pstar: empty scan interval");
  }
  auto slope = [&](double p) { return negative_gradient_slope(p, params); };

  const int n = opts.scan_points;
  const double step = (hi_edge - lo_edge) / (n - 1);
  bool found = false;
  double a = 0.0, b = 0.0;
  // Walk downward so the first bracket found is the largest one.
  double p_hi = hi_edge;
  double s_hi = slope(p_hi);
  for (int i = n - 2; i >= 0; --i) {
    const double p_lo = i == 0 ? lo_edge : lo_edge + step * i;
    const double s_lo = slope(p_lo);
    if (s_hi == 0.0) {
      return {p_hi, 0.0, {p_hi, p_hi}};
    }
    if ((s_lo < 0.0) != (s_hi < 0.0) || s_lo == 0.0) {
      a = p_lo;
      b = p_hi;
      found = true;
      break;
    }
    p_hi = p_lo;
    s_hi = s_lo;
  }
  if (!found) {
    throw NoCriticalPoint("no sign change of the negative gradient slope on (" +
                          std::to_string(lo_edge) + ", " + std::to_string(hi_edge) + ")");
  }

  double s_a = slope(a);
  if (s_a == 0.0) return {a, 0.0, {a, a}};
  while (b - a >= opts.tolerance) {
    const double mid = 0.5 * (a + b);
    if (mid <= a || mid >= b) break;
    const double s_mid = slope(mid);
    if (s_mid == 0.0) return {mid, 0.0, {mid, mid}};
    if ((s_mid < 0.0) == (s_a < 0.0)) {
      a = mid;
      s_a = s_mid;
    } else {
      b = mid;
    }
  }
  const double p_star = 0.5 * (a + b);
  return {p_star, slope(p_star), {a, b}};
}

/// Exact rational, used for series coefficients.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  static Rational make(std::int64_t num, std::int64_t den) {
    if (den == 0) throw InvalidInput("Rational: zero denominator");
    if (den < 0) {
      num = -num;
      den = -den;
    }
    const std::int64_t g = std::gcd(num, den);
    return g == 0 ? Rational{0, 1} : Rational{num / g, den / g};
  }
  friend Rational operator-(Rational a, Rational b) {
    return make(a.num * b.den - b.num * a.den, a.den * b.den);
  }
  friend bool operator==(const Rational&, const Rational&) = default;
  double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
};

/// Coefficient of (1-p)^k when gamma_plus is raised to 1 (all bases shift up by one).
inline Rational raised_focus_coefficient(int k) {
  return k >= 2 ? Rational::make(1, k - 1) : Rational{};
}

/// Coefficient of (1-p)^k when alpha1 is set to 0 and the rest is left as in BCE.
inline Rational dropped_linear_coefficient(int k) {
  return k >= 2 ? Rational::make(1, k) : Rational{};
}

/// Coefficient of (1-p)^k in the difference of the two choices: 1/(k(k-1)).
inline Rational interaction_coefficient(int k) {
  if (k < 1) throw InvalidInput("interaction_coefficient: k must be >= 1");
  return raised_focus_coefficient(k) - dropped_linear_coefficient(k);
}

/// Difference between raising gamma_plus to 1 and zeroing alpha1, summed for
/// terms i = 1..trunc_order: sum (1-p)^(i+1) / (i (i+1)).
inline double interaction_difference(double p, int trunc_order) {
  if (!(p > 0.0 && p <= 1.0)) throw InvalidInput("interaction_difference: p must lie in (0, 1]");
  if (trunc_order < 2) throw InvalidParams("interaction_difference: trunc_order must be >= 2");
  const double q = 1.0 - p;
  double power = q;
  double sum = 0.0;
  for (int i = 1; i <= trunc_order; ++i) {
    power *= q;
    sum += power / (static_cast<double>(i) * (i + 1));
  }
  return sum;
}

enum class Figure { poly_coeffs, lneg_curves, lneg_gradients };

inline Figure figure_from_number(int n) {
  switch (n) {
    case 1: return Figure::poly_coeffs;
    case 2: return Figure::lneg_curves;
    case 3: return Figure::lneg_gradients;
    default: throw InvalidInput("unknown figure id " + std::to_string(n));
  }
}

struct GridSpec {
  double lo = 0.001;
  double hi = 0.999;
  int points = 512;
  int poly_terms = 8;  // bases listed for poly_coeffs

  std::vector<double> samples() const {
    if (!(lo > 0.0 && hi < 1.0 && lo < hi) || points < 2) {
      throw InvalidInput("grid must satisfy 0 < lo < hi < 1 with at least 2 points");
    }
    std::vector<double> g(points);
    const double step = (hi - lo) / (points - 1);
    for (int i = 0; i < points; ++i) g[i] = lo + step * i;
    g.back() = hi;
    return g;
  }
};

struct NamedParams {
  std::string id;
  APLParams params;
};

/// Sampled curve. For poly_coeffs the grid holds basis exponents
/// m + gamma_plus instead of probabilities.
struct CurveTable {
  std::vector<double> grid;
  std::vector<double> values;
  std::string series_id;
  APLParams params_used;
};

/// Parameter sets drawn in each figure when none are given.
inline std::vector<NamedParams> default_figure_params(Figure fig) {
  switch (fig) {
    case Figure::poly_coeffs:
      return {{"BCE", APLParams::bce()},
              {"ASL", APLParams::asl(1.0, 0.0, 0.0)},
              {"APL", APLCoefficients{.alpha1 = 2.5, .alpha2 = 1.0, .gamma_plus = 1.0}}};
    case Figure::lneg_curves:
      return {{"BCE", APLParams::bce()},
              {"ASL", APLParams::asl(0.0, 2.0, 0.2)},
              {"APL", APLCoefficients{.beta1 = 1.5, .gamma_minus = 2.0, .p_th = 0.2}}};
    case Figure::lneg_gradients:
      return {{"BCE", APLParams::bce()},
              {"ASL", APLParams::asl(0.0, 1.8, 0.01)},
              {"APL", APLCoefficients{.beta1 = 1.5, .gamma_minus = 1.8, .p_th = 0.01}}};
  }
  return {};
}

inline std::vector<CurveTable> emit_curve(Figure fig, const std::vector<NamedParams>& series,
                                          const GridSpec& grid = {}) {
  std::vector<CurveTable> tables;
  tables.reserve(series.size());
  for (const auto& s : series) {
    CurveTable t{{}, {}, s.id, s.params};
    if (fig == Figure::poly_coeffs) {
      if (grid.poly_terms < 1) throw InvalidInput("poly_terms must be >= 1");
      for (int m = 1; m <= grid.poly_terms; ++m) {
        double coef = 1.0 / m;
        if (m == 1) coef = s.params.alpha1();
        if (m == 2) coef = s.params.alpha2();
        t.grid.push_back(m + s.params.gamma_plus());
        t.values.push_back(coef);
      }
    } else {
      t.grid = grid.samples();
      t.values.reserve(t.grid.size());
      for (double p : t.grid) {
        t.values.push_back(fig == Figure::lneg_curves ? negative_loss(p, s.params)
                                                      : negative_gradient_wrt_logit(p, s.params));
      }
    }
    tables.push_back(std::move(t));
  }
  return tables;
}

}  // namespace apl::analysis

#endif  // APL_ANALYSIS_HPP_
