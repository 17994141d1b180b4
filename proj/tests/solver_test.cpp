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

#include "smg/solver.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "support/test_models.hpp"

namespace smg {
namespace {

const double kReference[3] = {12.6054, 12.1271, 11.1653};

SolveReport solve_market() { return value_iterate(testing::market(), 1e-4, ValueFunction::constant(3, 1.0)); }

TEST(ValueIterate, SingleStateClosedForm) {
  const GameModel m = testing::single_state();
  const SolveReport r = value_iterate(m, 1e-10, ValueFunction({0.0}));
  EXPECT_NEAR(r.value[0], 4.0, 1e-9);
  EXPECT_EQ(r.equilibrium.f[0], std::vector<double>{1.0});
  EXPECT_EQ(r.equilibrium.g[0], std::vector<double>{1.0});
  EXPECT_LT(r.error_trace.back(), 1e-10);
}

TEST(ValueIterate, MarketModel) {
  const SolveReport r = solve_market();
  for (std::size_t x = 0; x < 3; ++x) EXPECT_NEAR(r.value[x], kReference[x], 5e-3);
  EXPECT_NEAR(static_cast<double>(r.iterations), 93.0, 10.0);
  EXPECT_LT(r.error_trace.back(), 1e-4);
  EXPECT_EQ(r.error_trace.size(), r.iterations);
  EXPECT_EQ(r.value_trace.size(), r.iterations);
  EXPECT_EQ(r.value_trace.back(), r.value);
  EXPECT_NEAR(r.epsilon_nash, 1e-4 / (1.0 - r.certificate.eta_gamma), 1e-15);
  EXPECT_LE(r.worst_duality_gap, 1e-9 * 13.0);
  // State 3 is a pure saddle at (a31, b31).
  EXPECT_NEAR(r.equilibrium.f[2][0], 1.0, 1e-9);
  EXPECT_NEAR(r.equilibrium.g[2][0], 1.0, 1e-9);
}

TEST(ValueIterate, FixedPointStartStopsAfterOneIteration) {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 20; ++trial) {
    const GameModel m = testing::random_model(rng);
    if (!check_assumptions(m).passed) continue;
    const SolveReport exact = value_iterate(m, 1e-12, ValueFunction::constant(m.num_states(), 0.0));
    const SolveReport again = value_iterate(m, 1e-6, exact.value);
    EXPECT_EQ(again.iterations, 1u);
    EXPECT_LT(again.error_trace.front(), 1e-6);
  }
}

TEST(ValueIterate, ErrorsAreReported) {
  const GameModel m = testing::market();
  try {
    value_iterate(m, 1e-4, ValueFunction::constant(3, 1.0), 5);
    FAIL() << "expected non-convergence";
  } catch (const ConvergenceError& e) {
    EXPECT_EQ(e.partial().iterations, 5u);
    EXPECT_EQ(e.partial().error_trace.size(), 5u);
  }
  EXPECT_THROW(value_iterate(m, 0.0, ValueFunction::constant(3, 1.0)), std::invalid_argument);
  EXPECT_THROW(value_iterate(m, 1e-4, ValueFunction::constant(2, 1.0)), std::invalid_argument);

  // A direct-weight triple above the certified gamma breaks the certificate.
  GameModel bad = testing::market();
  const double alpha = bad.blocks[0].at(0, 0).alpha;
  bad.blocks[0].at(0, 0).sojourn = DirectWeights{(1.0 - 0.999999) / alpha, 0.999999};
  EXPECT_THROW(value_iterate(bad, 1e-4, ValueFunction::constant(3, 1.0)), CertificateError);
}

TEST(IterationBound, Examples) {
  EXPECT_EQ(iteration_bound_from(0.0, 0.5, 0.1), 0);
  EXPECT_EQ(iteration_bound_from(1.0, 0.5, 0.1), 4);
  EXPECT_EQ(iteration_bound_from(0.05, 0.5, 0.1), 0);
  EXPECT_THROW(iteration_bound_from(1.0, 1.0, 0.1), std::domain_error);

  // A synthetic 0.5-contraction x -> x / 2 started at 2 (residual 1) first
  // meets |x_{n+1} - x_n| < 0.1 at n = 4.
  double x = 2.0;
  int n = 0;
  while (std::abs(x / 2 - x) >= 0.1) {
    x /= 2;
    ++n;
  }
  EXPECT_EQ(n, 4);

  const GameModel s = testing::single_state();
  EXPECT_EQ(iteration_bound(s, 1e-6, ValueFunction({4.0})), 0);
}

TEST(IterationBound, MarketModel) {
  const GameModel m = testing::market();
  const SolveReport r = solve_market();
  const std::int64_t bound = iteration_bound(m, 1e-4, ValueFunction::constant(3, 1.0));
  EXPECT_EQ(bound, r.n_epsilon_bound);
  EXPECT_LE(static_cast<std::int64_t>(r.stopping_index()), bound);
}

TEST(CertifySolution, Examples) {
  const GameModel s = testing::single_state();
  const auto single = certify_solution(s, value_iterate(s, 1e-10, ValueFunction({0.0})), 1e-8);
  EXPECT_TRUE(single.pass);
  EXPECT_NEAR(single.worst_violation, 0.0, 1e-12);

  const GameModel m = testing::market();
  SolveReport r = solve_market();
  EXPECT_TRUE(certify_solution(m, r, 2.0 * r.epsilon_nash).pass);

  // Replace g(1) by the point mass on the column that player 1 can exploit.
  const Matrix c = ShapleyOperator(m).payoff_matrix(r.value, 0);
  const auto ay0 = col_mix_payoffs(c, std::vector<double>{1.0, 0.0});
  const auto ay1 = col_mix_payoffs(c, std::vector<double>{0.0, 1.0});
  const double gain0 = *std::max_element(ay0.begin(), ay0.end());
  const double gain1 = *std::max_element(ay1.begin(), ay1.end());
  r.equilibrium.g[0] = gain0 > gain1 ? std::vector<double>{1.0, 0.0} : std::vector<double>{0.0, 1.0};
  const auto wrong = certify_solution(m, r, 2.0 * r.epsilon_nash);
  EXPECT_FALSE(wrong.pass);
  EXPECT_GT(wrong.worst_violation, 0.0);
}

class SolverProperties : public ::testing::Test {
 protected:
  std::mt19937_64 rng{43};

  // Random models that certify, kept small enough to converge quickly.
  GameModel certified_model(bool random_weight = false) {
    for (;;) {
      testing::RandomModelSpec spec;
      spec.random_weight = random_weight;
      GameModel m = testing::random_model(rng, spec);
      if (check_assumptions(m).passed && DiscountedCoefficients::from(m).max_continuation() < 0.995) return m;
    }
  }
};

TEST_F(SolverProperties, GeometricEnvelope) {
  std::vector<GameModel> models{testing::market()};
  for (int i = 0; i < 30; ++i) models.push_back(certified_model());
  for (const GameModel& m : models) {
    const double lmax = DiscountedCoefficients::from(m).max_continuation();
    const SolveReport r = value_iterate(m, 1e-8, testing::random_value(rng, m.num_states()));
    for (std::size_t k = 1; k < r.error_trace.size(); ++k) {
      ASSERT_LE(r.error_trace[k], lmax * r.error_trace[k - 1] + 1e-9) << "k = " << k;
      ASSERT_LE(r.error_trace[k], r.certificate.eta_gamma * r.error_trace[k - 1] + 1e-9);
    }
  }
}

TEST_F(SolverProperties, UniqueFixedPoint) {
  for (int i = 0; i < 10; ++i) {
    const GameModel m = certified_model(i % 2 == 1);
    const double eps = 1e-6;
    std::vector<ValueFunction> sols;
    double radius = 0.0;
    for (int start = 0; start < 10; ++start) {
      const SolveReport r = value_iterate(m, eps, testing::random_value(rng, m.num_states(), 100.0));
      sols.push_back(r.value);
      radius = 2.0 * r.epsilon_nash;
    }
    const auto w = DiscountedCoefficients::from(m).weight;
    for (const auto& v : sols) ASSERT_LE(weighted_distance(v, sols.front(), w), radius);
  }
}

TEST_F(SolverProperties, ConvergedReportsCertifyAndRespectBound) {
  for (int i = 0; i < 30; ++i) {
    const GameModel m = certified_model(i % 2 == 1);
    const SolveReport r = value_iterate(m, 1e-6, testing::random_value(rng, m.num_states()));
    ASSERT_TRUE(certify_solution(m, r, 2.0 * r.epsilon_nash).pass);
    ASSERT_LE(static_cast<std::int64_t>(r.stopping_index()), r.n_epsilon_bound);
  }
}

}  // namespace
}  // namespace smg
