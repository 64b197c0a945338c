/*
 * Copyright 2026 The rulehound Authors.
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

#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "rulehound/stats.hpp"
#include "test_util.hpp"

namespace rulehound {
namespace {

// Textbook two-pass formula, written out independently.
double reference_r(const std::vector<double>& x, const std::vector<double>& y) {
  long double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= x.size();
  my /= y.size();
  long double num = 0, dx = 0, dy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    num += (x[i] - mx) * (y[i] - my);
    dx += (x[i] - mx) * (x[i] - mx);
    dy += (y[i] - my) * (y[i] - my);
  }
  return static_cast<double>(num / std::sqrt(dx * dy));
}

TEST(Ppmcc, PerfectLinear) {
  EXPECT_NEAR(ppmcc(std::vector<double>{1, 2, 3}, std::vector<double>{2, 4, 6}), 1.0, 1e-12);
  EXPECT_NEAR(ppmcc(std::vector<double>{1, 2, 3}, std::vector<double>{3, 2, 1}), -1.0, 1e-12);
}

TEST(Ppmcc, ZeroVarianceGivesZero) {
  EXPECT_EQ(ppmcc(std::vector<double>{1, 1, 1}, std::vector<double>{1, 2, 3}), 0.0);
}

TEST(Ppmcc, Contract) {
  EXPECT_THROW(ppmcc(std::vector<double>{1, 2}, std::vector<double>{1}), ContractError);
  EXPECT_THROW(ppmcc(std::vector<double>{1}, std::vector<double>{1}), ContractError);
}

TEST(Ppmcc, PropertiesOnRandomVectors) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g(0.0, 3.0);
  std::uniform_real_distribution<double> scale(0.1, 10.0);
  std::uniform_int_distribution<int> len(2, 40);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = len(rng);
    std::vector<double> x(n), y(n);
    for (int i = 0; i < n; ++i) {
      x[i] = g(rng);
      y[i] = 0.5 * x[i] + g(rng);
    }
    const double r = ppmcc(x, y);
    ASSERT_LE(std::abs(r), 1.0);
    ASSERT_NEAR(r, reference_r(x, y), 1e-9);
    ASSERT_NEAR(r, ppmcc(y, x), 1e-12);
    const double a = scale(rng), b = g(rng), c = scale(rng), d = g(rng);
    std::vector<double> xs(n), ys(n), yneg(n);
    for (int i = 0; i < n; ++i) {
      xs[i] = a * x[i] + b;
      ys[i] = c * y[i] + d;
      yneg[i] = -c * y[i] + d;
    }
    ASSERT_NEAR(ppmcc(xs, ys), r, 1e-9);
    ASSERT_NEAR(ppmcc(xs, yneg), -r, 1e-9);
  }
}

TEST(WeightedRuleCorrelations, ScalesColumnsThenCorrelates) {
  const std::vector<double> w{1.0, 2.0, -1.0};
  const std::vector<std::vector<double>> rows{{1, 2, 3}, {1, 2, 3}, {3, 2, 1}};
  const auto c = weighted_rule_correlations(w, rows);
  ASSERT_EQ(c.size(), 2u);
  EXPECT_NEAR(c[0], 1.0, 1e-12);
  // {1,4,-3} against {3,4,-1}
  EXPECT_NEAR(c[1], reference_r({1, 4, -3}, {3, 4, -1}), 1e-12);
}

TEST(WeightedRuleCorrelations, SingleColumnGivesZeros) {
  const std::vector<double> w{1.0};
  const auto c = weighted_rule_correlations(w, {{1}, {2}, {3}});
  EXPECT_EQ(c, (std::vector<double>{0, 0}));
}

TEST(WeightedRuleCorrelations, RaggedThrows) {
  const std::vector<double> w{1.0, 1.0};
  EXPECT_THROW(weighted_rule_correlations(w, {{1, 2}, {1}}), ContractError);
}

TEST(StatesTargetsCorr, MatchesColumnwisePpmcc) {
  Dataset d{testing::continuous_data_schema(2), {}, Provenance::kFull};
  d.samples = {{{1, 5}, {0}, {}}, {{2, 4}, {0}, {}}, {{3, 1}, {1}, {}}, {{4, 0}, {1}, {}}};
  const auto c = states_targets_corr(d);
  ASSERT_EQ(c.size(), 2u);
  EXPECT_NEAR(c[0], reference_r({1, 2, 3, 4}, {0, 0, 1, 1}), 1e-12);
  EXPECT_NEAR(c[1], reference_r({5, 4, 1, 0}, {0, 0, 1, 1}), 1e-12);
  EXPECT_LT(c[1], 0.0);
}

TEST(StatesTargetsCorr, IrisPetalLengthIsStronglyRelated) {
  const auto iris = testing::load_named("iris");
  const auto c = states_targets_corr(iris);
  ASSERT_EQ(c.size(), 4u);
  EXPECT_GT(c[2], 0.9);
  EXPECT_GT(c[3], 0.9);
}

}  // namespace
}  // namespace rulehound
