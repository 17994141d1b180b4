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

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "smg/discounting.hpp"
#include "smg/linalg.hpp"
#include "smg/matrix_game.hpp"
#include "smg/model.hpp"

namespace smg {

// A real function on the states of a model.
struct ValueFunction {
  std::vector<double> values;

  ValueFunction() = default;
  explicit ValueFunction(std::vector<double> v) : values(std::move(v)) {}
  static ValueFunction constant(std::size_t n, double c) { return ValueFunction(std::vector<double>(n, c)); }

  std::size_t size() const { return values.size(); }
  double operator[](std::size_t x) const { return values[x]; }
  double& operator[](std::size_t x) { return values[x]; }

  // ||u||_omega = max_x |u(x)| / omega(x).
  double norm(std::span<const double> weight) const {
    double n = 0.0;
    for (std::size_t x = 0; x < values.size(); ++x) n = std::max(n, std::abs(values[x]) / weight[x]);
    return n;
  }

  bool operator==(const ValueFunction&) const = default;
};

inline double weighted_distance(const ValueFunction& u, const ValueFunction& v, std::span<const double> weight) {
  double n = 0.0;
  for (std::size_t x = 0; x < u.size(); ++x) n = std::max(n, std::abs(u[x] - v[x]) / weight[x]);
  return n;
}

// Per-state mixed strategies; f[x] over A(x), g[x] over B(x).
struct StationaryStrategyPair {
  std::vector<std::vector<double>> f;
  std::vector<std::vector<double>> g;

  bool operator==(const StationaryStrategyPair&) const = default;
};

class StrategyError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr double kSimplexTol = 1e-10;

inline void check_strategy_pair(const GameModel& m, const StationaryStrategyPair& pair) {
  const std::size_t n = m.num_states();
  if (pair.f.size() != n || pair.g.size() != n) throw StrategyError("strategy pair must cover every state");
  auto check = [&](const std::vector<double>& p, std::size_t expected, std::size_t x, const char* who) {
    if (p.size() != expected) {
      throw StrategyError(std::string(who) + " strategy at state '" + m.states[x] + "' has the wrong dimension");
    }
    double s = 0.0;
    for (double v : p) {
      if (!(v >= -kSimplexTol) || !std::isfinite(v)) {
        throw StrategyError(std::string(who) + " strategy at state '" + m.states[x] + "' has a negative entry");
      }
      s += v;
    }
    if (std::abs(s - 1.0) > kSimplexTol) {
      throw StrategyError(std::string(who) + " strategy at state '" + m.states[x] + "' does not sum to 1");
    }
  };
  for (std::size_t x = 0; x < n; ++x) {
    check(pair.f[x], m.blocks[x].rows(), x, "player 1");
    check(pair.g[x], m.blocks[x].cols(), x, "player 2");
  }
}

// Pure strategy pair from per-state action indices.
inline StationaryStrategyPair pure_pair(const GameModel& m, std::span<const std::size_t> a,
                                        std::span<const std::size_t> b) {
  StationaryStrategyPair p;
  for (std::size_t x = 0; x < m.num_states(); ++x) {
    p.f.emplace_back(m.blocks[x].rows(), 0.0);
    p.g.emplace_back(m.blocks[x].cols(), 0.0);
    p.f.back().at(a[x]) = 1.0;
    p.g.back().at(b[x]) = 1.0;
  }
  return p;
}

// The Shapley operator T and the strategy operators T(f,g) of a finite model.
// Coefficients (r d, lambda p) are computed once; each application only forms
// dot products with u.
class ShapleyOperator {
 public:
  explicit ShapleyOperator(const GameModel& m) : coeffs_(DiscountedCoefficients::from(m)) {}

  std::size_t num_states() const { return coeffs_.num_states(); }
  const DiscountedCoefficients& coefficients() const { return coeffs_; }
  std::span<const double> weight() const { return coeffs_.weight; }

  // C(u,x)_{ij} = r(x,a_i,b_j) d(x,a_i,b_j) + lambda(x,a_i,b_j) sum_y p(y|x,a_i,b_j) u(y).
  Matrix payoff_matrix(const ValueFunction& u, std::size_t x) const {
    check_value(u);
    if (x >= num_states()) throw std::out_of_range("unknown state index");
    const auto& blk = coeffs_.blocks[x];
    Matrix c(blk.rows, blk.cols);
    for (std::size_t i = 0; i < blk.rows; ++i) {
      for (std::size_t j = 0; j < blk.cols; ++j) {
        const auto& e = blk.at(i, j);
        double s = e.reward_term;
        for (std::size_t y = 0; y < e.row.size(); ++y) s += e.row[y] * u[y];
        c(i, j) = s;
      }
    }
    return c;
  }

  struct Application {
    ValueFunction value;
    StationaryStrategyPair equilibrium;
    double worst_duality_gap = 0.0;
  };

  // Tu(x) = value of the matrix game C(u,x), with the per-state saddle strategies.
  Application apply(const ValueFunction& u) const {
    std::vector<std::size_t> order(num_states());
    std::iota(order.begin(), order.end(), std::size_t{0});
    return apply_in_order(u, order);
  }

  // Same as apply(), visiting states in the given order. Each state's game
  // depends only on u, so the result does not depend on the order.
  Application apply_in_order(const ValueFunction& u, std::span<const std::size_t> order) const {
    check_value(u);
    const std::size_t n = num_states();
    Application out;
    out.value.values.assign(n, 0.0);
    out.equilibrium.f.resize(n);
    out.equilibrium.g.resize(n);
    for (std::size_t x : order) {
      MatrixGameSolution sol = solve_matrix_game(payoff_matrix(u, x));
      out.value[x] = sol.value;
      out.equilibrium.f[x] = std::move(sol.row_strategy);
      out.equilibrium.g[x] = std::move(sol.col_strategy);
      out.worst_duality_gap = std::max(out.worst_duality_gap, sol.duality_gap);
    }
    return out;
  }

  // T(f,g)u(x) = f(x)^T C(u,x) g(x).
  ValueFunction apply_pair(const StationaryStrategyPair& pair, const ValueFunction& u) const {
    check_pair_shape(pair);
    ValueFunction out(std::vector<double>(num_states(), 0.0));
    for (std::size_t x = 0; x < num_states(); ++x) {
      out[x] = expected_payoff(payoff_matrix(u, x), pair.f[x], pair.g[x]);
    }
    return out;
  }

  // Unique fixed point of T(f,g): solves (I - M) V = R with
  // M(x,y) = sum_{a,b} f(a|x) g(b|x) lambda p(y|x,a,b), R(x) = sum_{a,b} f g r d.
  ValueFunction evaluate_pair(const StationaryStrategyPair& pair) const {
    check_pair_shape(pair);
    const std::size_t n = num_states();
    Matrix lhs(n, n);
    std::vector<double> rhs(n, 0.0);
    for (std::size_t x = 0; x < n; ++x) {
      lhs(x, x) = 1.0;
      const auto& blk = coeffs_.blocks[x];
      for (std::size_t i = 0; i < blk.rows; ++i) {
        for (std::size_t j = 0; j < blk.cols; ++j) {
          const double w = pair.f[x][i] * pair.g[x][j];
          if (w == 0.0) continue;
          const auto& e = blk.at(i, j);
          rhs[x] += w * e.reward_term;
          for (std::size_t y = 0; y < n; ++y) lhs(x, y) -= w * e.row[y];
        }
      }
    }
    return ValueFunction(solve_linear_system(std::move(lhs), std::move(rhs)));
  }

 private:
  void check_value(const ValueFunction& u) const {
    if (u.size() != num_states()) throw std::invalid_argument("value function length does not match the model");
    for (double v : u.values) {
      if (!std::isfinite(v)) throw std::invalid_argument("value function entries must be finite");
    }
  }

  void check_pair_shape(const StationaryStrategyPair& pair) const {
    const std::size_t n = num_states();
    if (pair.f.size() != n || pair.g.size() != n) throw StrategyError("strategy pair must cover every state");
    for (std::size_t x = 0; x < n; ++x) {
      if (pair.f[x].size() != coeffs_.blocks[x].rows || pair.g[x].size() != coeffs_.blocks[x].cols) {
        throw StrategyError("strategy dimensions do not match the action sets");
      }
    }
  }

  DiscountedCoefficients coeffs_;
};

inline Matrix build_payoff_matrix(const GameModel& m, const ValueFunction& u, const std::string& state) {
  auto x = m.state_index(state);
  if (!x) throw std::out_of_range("unknown state '" + state + "'");
  return ShapleyOperator(m).payoff_matrix(u, *x);
}

inline ShapleyOperator::Application apply_shapley_operator(const GameModel& m, const ValueFunction& u) {
  return ShapleyOperator(m).apply(u);
}

inline ValueFunction apply_strategy_operator(const GameModel& m, const StationaryStrategyPair& pair,
                                             const ValueFunction& u) {
  return ShapleyOperator(m).apply_pair(pair, u);
}

inline ValueFunction evaluate_stationary_pair(const GameModel& m, const StationaryStrategyPair& pair) {
  check_strategy_pair(m, pair);
  return ShapleyOperator(m).evaluate_pair(pair);
}

}  // namespace smg
