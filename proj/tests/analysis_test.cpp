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

#include "apl/analysis.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "test_util.hpp"

namespace apl::analysis {
namespace {

using testing::random_params;
using testing::reference_entry_loss;
using testing::uniform;

const APLParams kFig3 = APLParams::asl(0.0, 1.8, 0.01);
const APLParams kFig3Beta15 = APLCoefficients{.beta1 = 1.5, .gamma_minus = 1.8, .p_th = 0.01};

TEST(PositiveGradient, Examples) {
  EXPECT_DOUBLE_EQ(positive_gradient(0.5, APLParams::bce()), 2.0);
  EXPECT_NEAR(positive_gradient(1.0 - 1e-9, APLCoefficients{.alpha1 = 3.0}), 3.0, 1e-8);
  EXPECT_DOUBLE_EQ(positive_gradient(0.5, APLCoefficients{.alpha2 = 2.0}), 3.5);
}

TEST(PositiveGradient, BceIsInverseP) {
  for (int i = 1; i < 1000; ++i) {
    const double p = i / 1000.0;
    EXPECT_NEAR(positive_gradient(p, APLParams::bce()), 1.0 / p, 1e-9 * std::max(1.0, 1.0 / p));
  }
}

TEST(PositiveGradient, MatchesFiniteDifferenceInP) {
  Rng rng(21);
  const double h = 1e-6;
  for (int t = 0; t < 200; ++t) {
    const APLParams a = random_params(rng);
    const double p = uniform(rng, 0.02, 0.98);
    const double numeric = -(reference_entry_loss(p + h, true, a) - reference_entry_loss(p - h, true, a)) / (2 * h);
    EXPECT_NEAR(positive_gradient(p, a), numeric, 1e-5 * std::max(1.0, std::abs(numeric)));
  }
}

TEST(NegativeGradient, Examples) {
  EXPECT_NEAR(negative_gradient_wrt_logit(0.7, APLParams::bce()), 0.7, 1e-12);
  for (double p : {0.001, 0.2, 0.3}) {
    EXPECT_EQ(negative_gradient_wrt_logit(p, APLParams::asl(0.0, 2.5, 0.3)), 0.0);
  }
  const double v = negative_gradient_wrt_logit(0.5, kFig3);
  EXPECT_GT(v, 0.0);
  const double l = 0.0, h = 1e-5;  // logit of 0.5
  const double numeric = (reference_entry_loss(sigmoid(l + h), false, kFig3) -
                          reference_entry_loss(sigmoid(l - h), false, kFig3)) / (2 * h);
  EXPECT_LT(std::abs(v - numeric) / v, 1e-4);
}

TEST(NegativeGradient, BceIsP) {
  for (int i = 1; i < 1000; ++i) {
    const double p = i / 1000.0;
    EXPECT_NEAR(negative_gradient_wrt_logit(p, APLParams::bce()), p, 1e-9);
  }
}

// The bracket formula and loss_core's product-rule gradient are separate derivations.
TEST(NegativeGradient, AgreesWithLossCoreGradient) {
  Rng rng(8);
  for (int t = 0; t < 500; ++t) {
    const APLParams a = random_params(rng);
    const double p = uniform(rng, 0.001, 0.999);
    const double x = negative_gradient_wrt_logit(p, a);
    EXPECT_NEAR(x, negative_loss_grad_logit(p, a), 1e-12 * std::max(1.0, std::abs(x)));
  }
}

TEST(NegativeGradient, SlopeMatchesFiniteDifference) {
  Rng rng(13);
  const double h = 1e-6;
  for (int t = 0; t < 300; ++t) {
    const APLParams a = random_params(rng);
    const double p = uniform(rng, a.p_th() + 1e-3, 0.99);
    const double numeric = (negative_gradient_wrt_logit(p + h, a) - negative_gradient_wrt_logit(p - h, a)) / (2 * h);
    EXPECT_NEAR(negative_gradient_slope(p, a), numeric, 1e-5 * std::max(1.0, std::abs(numeric)))
        << "p=" << p << " gm=" << a.gamma_minus() << " pth=" << a.p_th();
  }
}

TEST(FindPStar, MonotoneGradientHasNoCriticalPoint) {
  EXPECT_THROW(find_pstar(APLParams::bce()), NoCriticalPoint);
}

TEST(FindPStar, Figure3Settings) {
  const CriticalPoint cp = find_pstar(kFig3);
  EXPECT_GT(cp.p_star, 0.01);
  EXPECT_LT(cp.p_star, 1.0);
  EXPECT_LE(std::abs(cp.residual), 1e-8);
  EXPECT_LT(cp.bracket.second - cp.bracket.first, 1e-10);
  const double s_lo = negative_gradient_slope(cp.bracket.first, kFig3);
  const double s_hi = negative_gradient_slope(cp.bracket.second, kFig3);
  EXPECT_LT(s_lo * s_hi, 0.0);

  // Oracle: the gradient's argmax on a dense grid.
  double best_p = 0.0, best_g = -1.0;
  for (int i = 1; i < 200000; ++i) {
    const double p = i / 200000.0;
    const double g = negative_gradient_wrt_logit(p, kFig3);
    if (g > best_g) {
      best_g = g;
      best_p = p;
    }
  }
  EXPECT_NEAR(cp.p_star, best_p, 1e-4);
}

TEST(FindPStar, LargerBeta1MovesPeakLeft) {
  EXPECT_LT(find_pstar(kFig3Beta15).p_star, find_pstar(kFig3).p_star);
}

TEST(InteractionDifference, Examples) {
  EXPECT_EQ(interaction_difference(1.0, 50), 0.0);
  EXPECT_NEAR(interaction_difference(0.5, 200), 0.153426, 1e-6);
  EXPECT_THROW(interaction_difference(0.0, 10), InvalidInput);
  EXPECT_THROW(interaction_difference(0.5, 1), InvalidParams);
}

TEST(InteractionDifference, Coefficients) {
  EXPECT_EQ(interaction_coefficient(1), (Rational{0, 1}));
  EXPECT_EQ(interaction_coefficient(2), (Rational{1, 2}));
  EXPECT_EQ(interaction_coefficient(3), (Rational{1, 6}));
  EXPECT_EQ(interaction_coefficient(4), (Rational{1, 12}));
  for (int k = 2; k < 40; ++k) EXPECT_EQ(interaction_coefficient(k), Rational::make(1, k * (k - 1)));
}

// p ln p + 1 - p: sum over i of (1-p)^(i+1)/i minus sum over i>=2 of (1-p)^i/i,
// i.e. (1-p)(-ln p) - (-ln p - (1-p)).
TEST(InteractionDifference, ConvergesToClosedForm) {
  for (int i = 1; i <= 9; ++i) {
    const double p = i / 10.0;
    EXPECT_NEAR(interaction_difference(p, 10000), p * std::log(p) + 1.0 - p, 1e-9);
  }
}

TEST(InteractionDifference, EqualsDifferenceOfTwoLossSeries) {
  // Raising gamma_plus to 1 vs zeroing alpha1, both through the series evaluator.
  const APLParams raised = APLCoefficients{.gamma_plus = 1.0, .trunc_order = 400};
  const APLParams dropped = APLCoefficients{.alpha1 = 0.0, .trunc_order = 401};
  for (int i = 1; i <= 9; ++i) {
    const double p = i / 10.0;
    const auto probs = ProbMatrix::from_values(1, 1, {p});
    const LabelMatrix y(1, 1, {1});
    const double diff = apl_series_forward(probs, y, raised) - apl_series_forward(probs, y, dropped);
    EXPECT_NEAR(interaction_difference(p, 400), diff, 1e-12);
  }
}

TEST(InteractionDifference, NonnegativeAndVanishesAtOne) {
  double prev = 1.0;
  for (int i = 1; i <= 1000; ++i) {
    const double d = interaction_difference(i / 1000.0, 300);
    EXPECT_GE(d, 0.0);
    EXPECT_LE(d, prev);
    prev = d;
  }
  EXPECT_EQ(prev, 0.0);
}

TEST(EmitCurve, PolyCoefficientsOfBce) {
  GridSpec g;
  g.poly_terms = 6;
  const auto tables = emit_curve(Figure::poly_coeffs, {{"BCE", APLParams::bce()}}, g);
  ASSERT_EQ(tables.size(), 1u);
  ASSERT_EQ(tables[0].values.size(), 6u);
  for (int m = 1; m <= 6; ++m) {
    EXPECT_DOUBLE_EQ(tables[0].values[m - 1], 1.0 / m);
    EXPECT_DOUBLE_EQ(tables[0].grid[m - 1], m);
  }
  const auto asl = emit_curve(Figure::poly_coeffs, {{"ASL", APLParams::asl(2.0, 0, 0)}}, g);
  EXPECT_DOUBLE_EQ(asl[0].grid[0], 3.0);
}

TEST(EmitCurve, LossCurveDeadZone) {
  const auto tables = emit_curve(Figure::lneg_curves, default_figure_params(Figure::lneg_curves));
  ASSERT_EQ(tables.size(), 3u);
  for (const auto& t : tables) {
    ASSERT_EQ(t.grid.size(), 512u);
    EXPECT_TRUE(std::is_sorted(t.grid.begin(), t.grid.end()));
    if (t.series_id == "BCE") continue;
    for (std::size_t i = 0; i < t.grid.size(); ++i) {
      if (t.grid[i] <= 0.2) EXPECT_EQ(t.values[i], 0.0) << t.series_id << " p=" << t.grid[i];
      else EXPECT_GT(t.values[i], 0.0);
    }
  }
}

TEST(EmitCurve, GradientPeakMovesLeft) {
  const auto tables = emit_curve(Figure::lneg_gradients, {{"b1.0", kFig3}, {"b1.5", kFig3Beta15}});
  auto argmax = [](const CurveTable& t) {
    return t.grid[std::max_element(t.values.begin(), t.values.end()) - t.values.begin()];
  };
  EXPECT_LT(argmax(tables[1]), argmax(tables[0]));
}

TEST(EmitCurve, Errors) {
  EXPECT_THROW(figure_from_number(4), InvalidInput);
  GridSpec bad;
  bad.lo = 0.0;
  EXPECT_THROW(emit_curve(Figure::lneg_curves, {{"x", APLParams::bce()}}, bad), InvalidInput);
}

}  // namespace
}  // namespace apl::analysis
