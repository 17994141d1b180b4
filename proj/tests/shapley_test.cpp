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

#include "smg/shapley.hpp"

#include <gtest/gtest.h>

#include <random>

#include "smg/verify.hpp"
#include "support/oracles.hpp"
#include "support/test_models.hpp"

namespace smg {
namespace {

// Reference equilibrium of the market model (five digits), with the state-1
// and state-2 mixes attached to the player whose indifference they produce.
StationaryStrategyPair reference_pair() {
  StationaryStrategyPair p;
  p.f = {{0.55737, 0.44263}, {0.77887, 0.22113}, {1.0, 0.0}};
  p.g = {{0.60217, 0.39783}, {0.87111, 0.12889}, {1.0, 0.0}};
  return p;
}

const ValueFunction kReferenceValue({12.6054, 12.1271, 11.1653});

TEST(BuildPayoffMatrix, SingleState) {
  const GameModel m = testing::single_state();
  EXPECT_DOUBLE_EQ(build_payoff_matrix(m, ValueFunction({0.0}), "s")(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(build_payoff_matrix(m, ValueFunction({4.0}), "s")(0, 0), 4.0);
  EXPECT_THROW(build_payoff_matrix(m, ValueFunction({0.0}), "t"), std::out_of_range);
  EXPECT_THROW(build_payoff_matrix(m, ValueFunction({0.0, 1.0}), "s"), std::invalid_argument);
}

TEST(BuildPayoffMatrix, MarketModelEntry) {
  const GameModel m = testing::market();
  const Matrix c = build_payoff_matrix(m, ValueFunction::constant(3, 1.0), "1");
  // (r + beta) / (alpha + beta) for r = 40, beta = 20, alpha = 0.98.
  EXPECT_NEAR(c(0, 0), 60.0 / 20.98, 1e-14);
  EXPECT_NEAR(c(0, 0), 2.85986653956149, 1e-13);
}

TEST(ApplyShapleyOperator, SingleState) {
  const GameModel m = testing::single_state();
  EXPECT_DOUBLE_EQ(apply_shapley_operator(m, ValueFunction({0.0})).value[0], 1.0);
  EXPECT_NEAR(apply_shapley_operator(m, ValueFunction({4.0})).value[0], 4.0, 1e-15);
}

TEST(ApplyShapleyOperator, MarketModelMatchesPerStateClosedForm) {
  const GameModel m = testing::market();
  const ValueFunction u = ValueFunction::constant(3, 1.0);
  const auto t = apply_shapley_operator(m, u);
  for (std::size_t x = 0; x < 3; ++x) {
    const Matrix c = build_payoff_matrix(m, u, m.states[x]);
    const auto o = oracle::solve_2x2(c(0, 0), c(0, 1), c(1, 0), c(1, 1));
    EXPECT_NEAR(t.value[x], o.value, 1e-10) << m.states[x];
  }
}

TEST(ApplyStrategyOperator, PureAndConvexity) {
  const GameModel s = testing::single_state();
  EXPECT_DOUBLE_EQ(apply_strategy_operator(s, pure_pair(s, std::vector<std::size_t>{0}, std::vector<std::size_t>{0}),
                                           ValueFunction({0.0}))[0],
                   1.0);

  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 100; ++trial) {
    const GameModel m = testing::random_model(rng);
    const ShapleyOperator op(m);
    const ValueFunction u = testing::random_value(rng, m.num_states());
    StationaryStrategyPair p;
    for (const auto& blk : m.blocks) {
      p.f.push_back(testing::random_distribution(rng, blk.rows()));
      p.g.push_back(testing::random_distribution(rng, blk.cols()));
    }
    const ValueFunction tv = op.apply_pair(p, u);
    for (std::size_t x = 0; x < m.num_states(); ++x) {
      const Matrix c = op.payoff_matrix(u, x);
      const auto [lo, hi] = std::minmax_element(c.data().begin(), c.data().end());
      ASSERT_GE(tv[x], *lo - 1e-9);
      ASSERT_LE(tv[x], *hi + 1e-9);
    }
  }
}

TEST(ApplyStrategyOperator, ReferencePairReproducesReferenceValue) {
  const GameModel m = testing::market();
  const ValueFunction tv = apply_strategy_operator(m, reference_pair(), kReferenceValue);
  for (std::size_t x = 0; x < 3; ++x) EXPECT_NEAR(tv[x], kReferenceValue[x], 5e-3);
}

TEST(EvaluateStationaryPair, SingleState) {
  const GameModel m = testing::single_state();
  const auto v = evaluate_stationary_pair(m, pure_pair(m, std::vector<std::size_t>{0}, std::vector<std::size_t>{0}));
  EXPECT_NEAR(v[0], 4.0, 1e-14);
}

TEST(EvaluateStationaryPair, SymmetricSwap) {
  GameModel m;
  m.states = {"l", "r"};
  m.weight = {1.0, 1.0};
  for (std::size_t x = 0; x < 2; ++x) {
    StateBlock blk;
    blk.actions1 = {"a"};
    blk.actions2 = {"b"};
    std::vector<double> to(2, 0.0);
    to[1 - x] = 1.0;
    blk.triples.push_back(TripleData{0.3, 5.0, Uniform{1.2}, to});
    m.blocks.push_back(blk);
  }
  const auto v = evaluate_stationary_pair(m, pure_pair(m, std::vector<std::size_t>{0, 0}, std::vector<std::size_t>{0, 0}));
  EXPECT_NEAR(v[0], v[1], 1e-12);
  EXPECT_NEAR(v[0], 5.0 / 0.3, 1e-10);
}

TEST(EvaluateStationaryPair, ReferencePair) {
  const GameModel m = testing::market();
  const auto v = evaluate_stationary_pair(m, reference_pair());
  for (std::size_t x = 0; x < 3; ++x) EXPECT_NEAR(v[x], kReferenceValue[x], 5e-3);
}

TEST(EvaluateStationaryPair, RejectsInvalidPairs) {
  const GameModel m = testing::market();
  StationaryStrategyPair p = reference_pair();
  p.f[0] = {0.7, 0.7};
  EXPECT_THROW(evaluate_stationary_pair(m, p), StrategyError);
  p = reference_pair();
  p.g.pop_back();
  EXPECT_THROW(evaluate_stationary_pair(m, p), StrategyError);
}

TEST(EvaluateStationaryPair, FixedPointResidual) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 100; ++trial) {
    testing::RandomModelSpec spec;
    spec.random_weight = trial % 2 == 0;
    const GameModel m = testing::random_model(rng, spec);
    const ShapleyOperator op(m);
    StationaryStrategyPair p;
    for (const auto& blk : m.blocks) {
      p.f.push_back(testing::random_distribution(rng, blk.rows()));
      p.g.push_back(testing::random_distribution(rng, blk.cols()));
    }
    const ValueFunction v = op.evaluate_pair(p);
    ASSERT_LE(weighted_distance(op.apply_pair(p, v), v, op.weight()), 1e-10);
  }
}

class ShapleyProperties : public ::testing::Test {
 protected:
  std::mt19937_64 rng{31};
};

TEST_F(ShapleyProperties, Contraction) {
  int checked = 0;
  for (int trial = 0; checked < 200 && trial < 1000; ++trial) {
    testing::RandomModelSpec spec;
    spec.random_weight = trial % 3 == 0;
    const GameModel m = testing::random_model(rng, spec);
    const AssumptionCertificate cert = check_assumptions(m);
    if (!cert.passed) continue;
    ++checked;
    const ShapleyOperator op(m);
    const ValueFunction u = testing::random_value(rng, m.num_states());
    const ValueFunction v = testing::random_value(rng, m.num_states());
    const double before = weighted_distance(u, v, op.weight());
    const double after = weighted_distance(op.apply(u).value, op.apply(v).value, op.weight());
    ASSERT_LE(after, cert.eta_gamma * before + 1e-9);
    if (m.unit_weight()) {
      ASSERT_LE(after, cert.lambda_max * before + 1e-9);
    }
  }
  EXPECT_EQ(checked, 200);
}

TEST_F(ShapleyProperties, Monotonicity) {
  for (int trial = 0; trial < 200; ++trial) {
    const GameModel m = testing::random_model(rng);
    const ShapleyOperator op(m);
    const ValueFunction u = testing::random_value(rng, m.num_states());
    ValueFunction v = u;
    for (double& e : v.values) e += testing::draw(rng, 0.0, 10.0);
    const auto tu = op.apply(u).value;
    const auto tv = op.apply(v).value;
    for (std::size_t x = 0; x < m.num_states(); ++x) ASSERT_LE(tu[x], tv[x] + 1e-9);
  }
}

TEST_F(ShapleyProperties, ConstantShiftBounds) {
  for (int trial = 0; trial < 200; ++trial) {
    const GameModel m = testing::random_model(rng);
    const ShapleyOperator op(m);
    const double lmin = op.coefficients().min_continuation();
    const double lmax = op.coefficients().max_continuation();
    const ValueFunction u = testing::random_value(rng, m.num_states());
    const double c = testing::draw(rng, 0.0, 20.0);
    ValueFunction shifted = u;
    for (double& e : shifted.values) e += c;
    const auto tu = op.apply(u).value;
    const auto ts = op.apply(shifted).value;
    for (std::size_t x = 0; x < m.num_states(); ++x) {
      ASSERT_GE(ts[x], tu[x] + c * lmin - 1e-9);
      ASSERT_LE(ts[x], tu[x] + c * lmax + 1e-9);
    }
  }
}

TEST_F(ShapleyProperties, MinimaxInterchangeAtEveryState) {
  for (int trial = 0; trial < 200; ++trial) {
    const GameModel m = testing::random_model(rng);
    const ShapleyOperator op(m);
    const ValueFunction u = testing::random_value(rng, m.num_states());
    const auto app = op.apply(u);
    for (std::size_t x = 0; x < m.num_states(); ++x) {
      const Matrix c = op.payoff_matrix(u, x);
      const auto xa = row_mix_payoffs(c, app.equilibrium.f[x]);
      const auto ay = col_mix_payoffs(c, app.equilibrium.g[x]);
      const double maxmin = *std::min_element(xa.begin(), xa.end());
      const double minmax = *std::max_element(ay.begin(), ay.end());
      ASSERT_NEAR(maxmin, minmax, 1e-9 * std::max(1.0, std::abs(app.value[x])));
    }
  }
}

TEST_F(ShapleyProperties, OrderIndependence) {
  for (int trial = 0; trial < 50; ++trial) {
    const GameModel m = testing::random_model(rng);
    const ShapleyOperator op(m);
    const ValueFunction u = testing::random_value(rng, m.num_states());
    std::vector<std::size_t> rev(m.num_states());
    for (std::size_t x = 0; x < rev.size(); ++x) rev[x] = rev.size() - 1 - x;
    const auto a = op.apply(u);
    const auto b = op.apply_in_order(u, rev);
    ASSERT_EQ(a.value, b.value);
    ASSERT_EQ(a.equilibrium, b.equilibrium);
  }
}

}  // namespace
}  // namespace smg
