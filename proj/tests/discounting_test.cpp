// Copyright 2026 The smg Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "smg/discounting.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "support/oracles.hpp"
#include "support/test_models.hpp"

namespace smg {
namespace {

// Frozen from 30-digit quadrature of the defining integrals.
constexpr double kExpLambda = 0.953288846520495710;  // beta = 20, alpha = 0.98
constexpr double kExpD = 0.0476644423260247855;
constexpr double kUnifLambda = 0.867066045511334034;  // beta = 0.34, alpha = 0.86
constexpr double kUnifD = 0.154574365684495309;

TEST(ContinuationWeight, Exponential) {
  EXPECT_NEAR(continuation_weight(Exponential{20.0}, 0.98), kExpLambda, 1e-15);
  EXPECT_NEAR(continuation_weight(Exponential{20.0}, 0.98), 20.0 / 20.98, 1e-15);
}

TEST(ContinuationWeight, Uniform) { EXPECT_NEAR(continuation_weight(Uniform{0.34}, 0.86), kUnifLambda, 1e-15); }

TEST(ContinuationWeight, DirectIsPassthrough) {
  EXPECT_EQ(continuation_weight(DirectWeights{0.5, 0.75}, 0.5), 0.75);
}

TEST(ContinuationWeight, DeterministicAndSmallArgumentSeries) {
  EXPECT_DOUBLE_EQ(continuation_weight(Deterministic{2.0}, 0.3), std::exp(-0.6));
  // alpha * upper below the series cutoff.
  const double z = 1e-10;
  EXPECT_NEAR(continuation_weight(Uniform{z}, 1.0), 1.0 - z / 2, 1e-18);
  EXPECT_LT(continuation_weight(Uniform{z}, 1.0), 1.0);
}

TEST(RewardWeight, Examples) {
  EXPECT_NEAR(reward_weight(Exponential{20.0}, 0.98), kExpD, 1e-16);
  EXPECT_NEAR(reward_weight(Exponential{20.0}, 0.98), 1.0 / 20.98, 1e-16);
  EXPECT_NEAR(reward_weight(Uniform{0.34}, 0.86), kUnifD, 1e-15);
  // alpha * tau = 20: d -> 1/alpha.
  const double alpha = 0.8;
  EXPECT_NEAR(reward_weight(Deterministic{20.0 / alpha}, alpha), 1.0 / alpha, 1e-8);
  EXPECT_EQ(reward_weight(DirectWeights{0.5, 0.75}, 0.5), 0.5);
}

TEST(RewardWeight, MatchesClosedFormForUniform) {
  // r-weight (alpha beta - 1 + e^{-alpha beta}) / (alpha^2 beta).
  for (double beta : {0.15, 0.34, 0.44, 0.55, 3.0}) {
    for (double alpha : {0.82, 0.86, 0.89}) {
      const double z = alpha * beta;
      EXPECT_NEAR(reward_weight(Uniform{beta}, alpha), (z - 1 + std::exp(-z)) / (alpha * alpha * beta), 1e-14);
    }
  }
}

TEST(DiscountingProperties, IdentityAndQuadratureOnRandomDraws) {
  std::mt19937_64 rng(2026);
  for (int i = 0; i < 1000; ++i) {
    const double alpha = testing::draw(rng, 0.05, 5.0);
    const SojournLaw law = testing::random_law(rng, alpha, true);
    const double lam = continuation_weight(law, alpha);
    const double d = reward_weight(law, alpha);
    ASSERT_GT(lam, 0.0);
    ASSERT_LT(lam, 1.0);
    ASSERT_LE(std::abs(d - (1.0 - lam) / alpha), 1e-12 * std::max(1.0, d));
    const oracle::Coefficients q = oracle::quadrature(law, alpha);
    ASSERT_NEAR(lam, q.continuation, 1e-9);
    ASSERT_NEAR(d, q.reward_weight, 1e-9);
  }
}

TEST(DiscountingProperties, ContinuationDecreasesInAlpha) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 300; ++i) {
    const double alpha = testing::draw(rng, 0.05, 3.0);
    const SojournLaw law = testing::random_law(rng, alpha, true);
    EXPECT_GT(continuation_weight(law, alpha), continuation_weight(law, alpha * 1.01));
  }
}

TEST(KernelRow, MarketModelTriple) {
  const GameModel m = testing::market();
  const KernelRow k = discounted_kernel_row(m, TripleRef{0, 0, 0});
  EXPECT_NEAR(k.continuation, kExpLambda, 1e-15);
  ASSERT_EQ(k.row.size(), 3u);
  EXPECT_EQ(k.row[0], 0.0);
  EXPECT_NEAR(k.row[1], 0.476644423260247855, 1e-15);
  EXPECT_NEAR(k.row[2], 0.476644423260247855, 1e-15);
}

TEST(KernelRow, PointMassDeterministic) {
  GameModel m = testing::market();
  m.blocks[1].at(1, 0).sojourn = Deterministic{1.25};
  m.blocks[1].at(1, 0).transition = {0.0, 0.0, 1.0};
  const double alpha = m.blocks[1].at(1, 0).alpha;
  const KernelRow k = discounted_kernel_row(m, TripleRef{1, 1, 0});
  EXPECT_EQ(k.row[0], 0.0);
  EXPECT_EQ(k.row[1], 0.0);
  EXPECT_DOUBLE_EQ(k.row[2], std::exp(-alpha * 1.25));
}

TEST(KernelRow, SingleStateAndMissingTriple) {
  const GameModel m = testing::single_state();
  const KernelRow k = discounted_kernel_row(m, TripleRef{0, 0, 0});
  ASSERT_EQ(k.row.size(), 1u);
  EXPECT_DOUBLE_EQ(k.row[0], 0.75);
  EXPECT_THROW(discounted_kernel_row(m, TripleRef{0, 1, 0}), std::out_of_range);
  EXPECT_THROW(discounted_kernel_row(m, TripleRef{3, 0, 0}), std::out_of_range);
}

TEST(KernelRow, RowsSumToLambdaOnRandomModels) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const GameModel m = testing::random_model(rng);
    for (const auto& blk : m.blocks) {
      for (const auto& t : blk.triples) {
        const KernelRow k = discounted_kernel_row(t);
        double s = 0.0;
        for (double v : k.row) {
          EXPECT_GE(v, 0.0);
          s += v;
        }
        EXPECT_NEAR(s, k.continuation, 1e-12);
      }
    }
  }
}

TEST(SojournCdf, Laws) {
  EXPECT_DOUBLE_EQ(sojourn_cdf(Exponential{1.0}, 1.0), 1.0 - std::exp(-1.0));
  EXPECT_DOUBLE_EQ(sojourn_cdf(Uniform{2.0}, 1.0), 0.5);
  EXPECT_EQ(sojourn_cdf(Uniform{2.0}, 3.0), 1.0);
  EXPECT_EQ(sojourn_cdf(Deterministic{2.0}, 1.999), 0.0);
  EXPECT_EQ(sojourn_cdf(Deterministic{2.0}, 2.0), 1.0);
  EXPECT_THROW(sojourn_cdf(DirectWeights{0.5, 0.75}, 1.0), std::invalid_argument);
}

}  // namespace
}  // namespace smg
