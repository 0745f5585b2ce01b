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

#ifndef APL_LOSS_HPP_
#define APL_LOSS_HPP_

#include <cmath>
#include <string>

#include "apl/errors.hpp"
#include "apl/matrix.hpp"

namespace apl {

/// Plain aggregate for building APLParams with designated initializers.
/// The defaults are the plain BCE setting.
struct APLCoefficients {
  double alpha1 = 1.0;
  double alpha2 = 0.5;
  double beta1 = 1.0;
  double gamma_plus = 0.0;
  double gamma_minus = 0.0;
  double p_th = 0.0;
  int trunc_order = 200;
};

/**
 * Hyperparameters of the asymmetric polynomial loss.
 *
 * Positive entries (y = 1) use
 *   (1-p)^gamma_plus * [-log p + (alpha1-1)(1-p) + (alpha2-1/2)(1-p)^2]
 * and negative entries (y = 0) use, with r = max(p - p_th, 0),
 *   r^gamma_minus * [-log(1-r) + (beta1-1) r].
 *
 * alpha1 = 1, alpha2 = 1/2, beta1 = 1 is the asymmetric-loss (ASL) setting;
 * additionally gamma_plus = gamma_minus = p_th = 0 is plain BCE.
 * trunc_order is the number of terms used by the series evaluators.
 */
class APLParams {
 public:
  APLParams() = default;
  APLParams(const APLCoefficients& c) : c_(c) { validate(c_); }  // NOLINT(google-explicit-constructor)

  static APLParams bce() { return {}; }
  static APLParams asl(double gamma_plus, double gamma_minus, double p_th) {
    return APLCoefficients{.gamma_plus = gamma_plus, .gamma_minus = gamma_minus, .p_th = p_th};
  }

  double alpha1() const noexcept { return c_.alpha1; }
  double alpha2() const noexcept { return c_.alpha2; }
  double beta1() const noexcept { return c_.beta1; }
  double gamma_plus() const noexcept { return c_.gamma_plus; }
  double gamma_minus() const noexcept { return c_.gamma_minus; }
  double p_th() const noexcept { return c_.p_th; }
  int trunc_order() const noexcept { return c_.trunc_order; }
  const APLCoefficients& coefficients() const noexcept { return c_; }

  APLParams with_trunc_order(int m) const {
    APLCoefficients c = c_;
    c.trunc_order = m;
    return c;
  }

  static void validate(const APLCoefficients& c) {
    auto finite_nonneg = [](double v, const char* name) {
      if (!std::isfinite(v) || v < 0.0) {
        throw InvalidParams(std::string(name) + " must be finite and >= 0, got " +
                            std::to_string(v));
      }
    };
    finite_nonneg(c.alpha1, "alpha1");
    finite_nonneg(c.alpha2, "alpha2");
    finite_nonneg(c.beta1, "beta1");
    finite_nonneg(c.gamma_plus, "gamma_plus");
    finite_nonneg(c.gamma_minus, "gamma_minus");
    if (!(c.p_th >= 0.0 && c.p_th < 1.0)) {
      throw InvalidParams("p_th must lie in [0, 1), got " + std::to_string(c.p_th));
    }
    if (c.trunc_order < 1) {
      throw InvalidParams("trunc_order must be >= 1, got " + std::to_string(c.trunc_order));
    }
  }

 private:
  APLCoefficients c_;
};

/// Mean loss over all B*C entries and its gradient with respect to the logits.
struct LossOutput {
  double value = 0.0;
  Matrix grad;
};

/// x^g with 0^0 = 1. std::pow already follows that convention; the explicit
/// branch keeps gamma = 0 exact for every x.
inline double focus_pow(double x, double g) { return g == 0.0 ? 1.0 : std::pow(x, g); }

/// max(p - p_th, 0)
inline double shift_probability(double p, double p_th) {
  if (!(p > 0.0 && p < 1.0)) throw InvalidInput("shift_probability: p must lie in (0, 1)");
  if (!(p_th >= 0.0 && p_th < 1.0)) throw InvalidInput("shift_probability: p_th must lie in [0, 1)");
  return p > p_th ? p - p_th : 0.0;
}

inline double sigmoid(double l) {
  if (!std::isfinite(l)) throw InvalidInput("sigmoid: non-finite logit");
  double p;
  if (l >= 0.0) {
    p = 1.0 / (1.0 + std::exp(-l));
  } else {
    const double e = std::exp(l);
    p = e / (1.0 + e);
  }
  return ProbMatrix::clamp(p);
}

inline ProbMatrix sigmoid(const LogitMatrix& logits) {
  std::vector<double> p(logits.size());
  auto l = logits.values();
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = sigmoid(l[i]);
  return ProbMatrix::from_values(logits.rows(), logits.cols(), std::move(p));
}

// Per-entry closed forms. p is a clamped probability.

inline double positive_loss(double p, const APLParams& params) {
  const double q = 1.0 - p;
  const double poly = -std::log(p) + (params.alpha1() - 1.0) * q + (params.alpha2() - 0.5) * q * q;
  return focus_pow(q, params.gamma_plus()) * poly;
}

inline double negative_loss(double p, const APLParams& params) {
  if (p <= params.p_th()) return 0.0;
  const double r = p - params.p_th();
  const double poly = -std::log1p(-r) + (params.beta1() - 1.0) * r;
  return focus_pow(r, params.gamma_minus()) * poly;
}

/// d(positive_loss)/d(logit), product rule through the sigmoid.
inline double positive_loss_grad_logit(double p, const APLParams& params) {
  const double q = 1.0 - p;
  const double gp = params.gamma_plus();
  const double poly = -std::log(p) + (params.alpha1() - 1.0) * q + (params.alpha2() - 0.5) * q * q;
  // p*q*d(poly)/dp = -q - (alpha1-1) p q - (2 alpha2 - 1) p q^2
  const double dpoly = -q - (params.alpha1() - 1.0) * p * q - (2.0 * params.alpha2() - 1.0) * p * q * q;
  const double focus_term = gp == 0.0 ? 0.0 : -gp * p * poly;
  return focus_pow(q, gp) * (focus_term + dpoly);
}

/// d(negative_loss)/d(logit). Exactly 0 for p <= p_th.
inline double negative_loss_grad_logit(double p, const APLParams& params) {
  if (p <= params.p_th()) return 0.0;
  const double q = 1.0 - p;
  const double gm = params.gamma_minus();
  const double r = p - params.p_th();
  const double b1 = params.beta1() - 1.0;
  // p*q/(1-r) is written so that it is exactly p when p_th = 0.
  const double dpoly = p * (q / (1.0 - r)) + b1 * p * q;
  double focus_term = 0.0;
  if (gm != 0.0) {
    const double poly_over_r = -std::log1p(-r) / r + b1;
    focus_term = gm * p * q * poly_over_r;
  }
  return focus_pow(r, gm) * (dpoly + focus_term);
}

inline double entry_loss(double p, bool y, const APLParams& params) {
  return y ? positive_loss(p, params) : negative_loss(p, params);
}

inline double entry_grad_logit(double p, bool y, const APLParams& params) {
  return y ? positive_loss_grad_logit(p, params) : negative_loss_grad_logit(p, params);
}

/// Mean binary cross-entropy; gradient (p - y)/N with respect to the logits.
inline LossOutput bce(const ProbMatrix& probs, const LabelMatrix& labels) {
  require_same_shape(probs, labels, "bce");
  const double n = static_cast<double>(probs.size());
  LossOutput out{0.0, Matrix(probs.rows(), probs.cols())};
  auto p = probs.values();
  auto y = labels.values();
  auto g = out.grad.values();
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    sum += y[i] ? -std::log(p[i]) : -std::log1p(-p[i]);
    g[i] = (p[i] - (y[i] ? 1.0 : 0.0)) / n;
  }
  out.value = sum / n;
  return out;
}

/// BCE's Taylor series truncated after trunc_order terms: sum (1-p)^m/m for
/// positives and sum p^n/n for negatives, averaged over entries.
inline double taylor_bce(const ProbMatrix& probs, const LabelMatrix& labels, int trunc_order) {
  require_same_shape(probs, labels, "taylor_bce");
  if (trunc_order < 1) throw InvalidParams("taylor_bce: trunc_order must be >= 1");
  auto p = probs.values();
  auto y = labels.values();
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double x = y[i] ? 1.0 - p[i] : p[i];
    double power = 1.0;
    double term_sum = 0.0;
    for (int m = 1; m <= trunc_order; ++m) {
      power *= x;
      term_sum += power / m;
    }
    sum += term_sum;
  }
  return sum / static_cast<double>(p.size());
}

/// Closed-form APL on logits: mean value and analytic gradient.
inline LossOutput apl_forward_backward(const LogitMatrix& logits, const LabelMatrix& labels,
                                       const APLParams& params) {
  require_same_shape(logits, labels, "apl_forward_backward");
  const ProbMatrix probs = sigmoid(logits);
  const double n = static_cast<double>(probs.size());
  LossOutput out{0.0, Matrix(probs.rows(), probs.cols())};
  auto p = probs.values();
  auto y = labels.values();
  auto g = out.grad.values();
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    sum += entry_loss(p[i], y[i] != 0, params);
    g[i] = entry_grad_logit(p[i], y[i] != 0, params) / n;
  }
  out.value = sum / n;
  return out;
}

/// APL evaluated term by term from its polynomial series, trunc_order terms per
/// entry. Coefficients are alpha1, alpha2, 1/3, 1/4, ... for positives and
/// beta1, 1/2, 1/3, ... for negatives.
inline double apl_series_forward(const ProbMatrix& probs, const LabelMatrix& labels,
                                 const APLParams& params) {
  require_same_shape(probs, labels, "apl_series_forward");
  const int order = params.trunc_order();
  auto p = probs.values();
  auto y = labels.values();
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    double base;
    double gamma;
    if (y[i]) {
      base = 1.0 - p[i];
      gamma = params.gamma_plus();
    } else {
      base = p[i] > params.p_th() ? p[i] - params.p_th() : 0.0;
      gamma = params.gamma_minus();
    }
    if (base == 0.0) continue;
    double power = 1.0;
    double series = 0.0;
    for (int m = 1; m <= order; ++m) {
      power *= base;
      double coef = 1.0 / m;
      if (y[i]) {
        if (m == 1) coef = params.alpha1();
        if (m == 2) coef = params.alpha2();
      } else if (m == 1) {
        coef = params.beta1();
      }
      series += coef * power;
    }
    sum += focus_pow(base, gamma) * series;
  }
  return sum / static_cast<double>(p.size());
}

}  // namespace apl

#endif  // APL_LOSS_HPP_
