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

#include "apl/synth_data.hpp"

#include <gtest/gtest.h>

#include <sstream>

namespace apl::synth {
namespace {

TEST(Generate, DeterministicUnderSeed) {
  DatasetSpec spec{.n_samples = 300, .n_features = 10, .n_classes = 5, .positive_rate = 0.1, .seed = 42};
  const Dataset a = generate(spec);
  const Dataset b = generate(spec);
  EXPECT_EQ(a, b);
  std::ostringstream sa, sb;
  write_csv(sa, a);
  write_csv(sb, b);
  EXPECT_EQ(sa.str(), sb.str());
  spec.seed = 43;
  EXPECT_NE(generate(spec).labels, a.labels);
}

TEST(Generate, BalancedRate) {
  const Dataset d = generate({.n_samples = 10000, .n_features = 20, .n_classes = 4, .positive_rate = 0.5, .seed = 1});
  const double rate = positive_fraction(d.labels);
  EXPECT_GE(rate, 0.45);
  EXPECT_LE(rate, 0.55);
}

TEST(Generate, ImbalancedPositivesPerSample) {
  const Dataset d = generate({.n_samples = 5000, .n_features = 50, .n_classes = 20, .positive_rate = 0.05, .seed = 9});
  const double per_sample = positive_fraction(d.labels) * 20;
  EXPECT_GE(per_sample, 0.8 * 0.05 * 20);
  EXPECT_LE(per_sample, 1.2 * 0.05 * 20);
}

TEST(Generate, EveryClassAtTargetRate) {
  const Dataset d = generate({.n_samples = 2000, .n_features = 8, .n_classes = 6, .positive_rate = 0.1, .seed = 3});
  for (std::size_t c = 0; c < 6; ++c) {
    int count = 0;
    for (std::size_t s = 0; s < 2000; ++s) count += d.labels(s, c);
    EXPECT_EQ(count, 200);
  }
}

TEST(Generate, LabelsFollowGeneratingWeights) {
  const Dataset d = generate({.n_samples = 2000, .n_features = 30, .n_classes = 10, .positive_rate = 0.05,
                              .noise_std = 0.5, .seed = 4});
  const metrics::RankedPredictions oracle(generating_scores(d), d.labels);
  const metrics::RankedPredictions zero(Matrix(2000, 10), d.labels);
  EXPECT_GT(metrics::mean_average_precision(oracle), metrics::mean_average_precision(zero) + 0.3);
}

TEST(Generate, RejectsInvalidSpec) {
  EXPECT_THROW(generate({.positive_rate = 0.0}), InvalidParams);
  EXPECT_THROW(generate({.positive_rate = 0.6}), InvalidParams);
  EXPECT_THROW(generate({.n_samples = 0}), InvalidParams);
  EXPECT_THROW(generate({.noise_std = -1.0}), InvalidParams);
}

TEST(Split, PartitionsRowsInOrder) {
  const Dataset d = generate({.n_samples = 100, .n_features = 3, .n_classes = 2, .positive_rate = 0.2, .seed = 5});
  const auto [train, valid] = split(d, 0.2);
  EXPECT_EQ(train.samples(), 80u);
  EXPECT_EQ(valid.samples(), 20u);
  EXPECT_EQ(valid.features(0, 2), d.features(80, 2));
  EXPECT_EQ(valid.labels(19, 1), d.labels(99, 1));
  EXPECT_THROW(split(d, 1.0), InvalidParams);
}

TEST(WriteCsv, Layout) {
  Dataset d{Matrix(2, 2, {1.0, 0.5, -2.0, 1.0 / 3.0}), LabelMatrix(2, 1, {1, 0}), Matrix(2, 1), {0.0}};
  std::ostringstream os;
  write_csv(os, d);
  EXPECT_EQ(os.str(), "f0,f1,y0\n1,0.5,1\n-2,0.333333333,0\n");
}

}  // namespace
}  // namespace apl::synth
