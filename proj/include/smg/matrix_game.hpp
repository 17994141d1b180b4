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
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "smg/linalg.hpp"
#include "smg/simplex.hpp"

namespace smg {

// Solution of a zero-sum matrix game; the row player maximizes.
struct MatrixGameSolution {
  double value = 0.0;
  std::vector<double> row_strategy;
  std::vector<double> col_strategy;
  // max_i (A y)_i - min_j (x A)_j, which bounds how far either strategy is from optimal.
  double duality_gap = 0.0;
};

class MatrixGameError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SaddleCheck {
  bool ok = true;
  // Largest gain of a pure deviation over E(X, Y); positive means a violation.
  double worst_violation = 0.0;
};

// (x A)_j for every column.
inline std::vector<double> row_mix_payoffs(const Matrix& a, std::span<const double> x) {
  std::vector<double> out(a.cols(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    if (x[i] == 0.0) continue;
    for (std::size_t j = 0; j < a.cols(); ++j) out[j] += x[i] * a(i, j);
  }
  return out;
}

// (A y)_i for every row.
inline std::vector<double> col_mix_payoffs(const Matrix& a, std::span<const double> y) {
  std::vector<double> out(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * y[j];
    out[i] = s;
  }
  return out;
}

// E(X, Y) = X A Y^T.
inline double expected_payoff(const Matrix& a, std::span<const double> x, std::span<const double> y) {
  const auto ay = col_mix_payoffs(a, y);
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) s += x[i] * ay[i];
  return s;
}

// Checks E(e_i, Y) <= E(X, Y) <= E(X, e_j) within tol for every pure deviation.
inline SaddleCheck verify_saddle_point(const Matrix& a, std::span<const double> x, std::span<const double> y,
                                       double tol) {
  if (x.size() != a.rows() || y.size() != a.cols()) {
    throw std::invalid_argument("verify_saddle_point: strategy dimensions do not match the matrix");
  }
  const double e = expected_payoff(a, x, y);
  double worst = -std::numeric_limits<double>::infinity();
  for (double v : col_mix_payoffs(a, y)) worst = std::max(worst, v - e);
  for (double v : row_mix_payoffs(a, x)) worst = std::max(worst, e - v);
  return {worst <= tol, worst};
}

namespace detail {

// Clears round-off negatives and renormalizes onto the simplex.
inline void project_to_simplex(std::vector<double>& p) {
  double s = 0.0;
  for (double& v : p) {
    if (v < 0.0) v = 0.0;
    s += v;
  }
  if (s <= 0.0) throw MatrixGameError("LP returned an empty strategy");
  for (double& v : p) v /= s;
}

// Row player's LP: max v s.t. sum_i a_ij x_i >= v, sum x = 1, x >= 0, with the
// free v split as v+ - v-. Returns x followed by v.
inline std::pair<std::vector<double>, double> solve_row_player(const Matrix& a) {
  const std::size_t m = a.rows();
  const std::size_t l = a.cols();
  lp::LinearProgram prog;
  prog.objective.assign(m + 2, 0.0);
  prog.objective[m] = -1.0;
  prog.objective[m + 1] = 1.0;
  for (std::size_t j = 0; j < l; ++j) {
    lp::Constraint c;
    c.coeffs.assign(m + 2, 0.0);
    for (std::size_t i = 0; i < m; ++i) c.coeffs[i] = -a(i, j);
    c.coeffs[m] = 1.0;
    c.coeffs[m + 1] = -1.0;
    c.sense = lp::Sense::kLessEqual;
    c.rhs = 0.0;
    prog.constraints.push_back(std::move(c));
  }
  lp::Constraint sum;
  sum.coeffs.assign(m + 2, 0.0);
  for (std::size_t i = 0; i < m; ++i) sum.coeffs[i] = 1.0;
  sum.sense = lp::Sense::kEqual;
  sum.rhs = 1.0;
  prog.constraints.push_back(std::move(sum));

  const lp::Result r = lp::solve(prog);
  if (r.status != lp::Status::kOptimal) throw MatrixGameError("matrix game LP did not reach an optimum");
  std::vector<double> x(r.x.begin(), r.x.begin() + static_cast<std::ptrdiff_t>(m));
  return {std::move(x), r.x[m] - r.x[m + 1]};
}

}  // namespace detail

// Solves the zero-sum game with payoff matrix a (row player maximizes) through the
// pair of primal LPs for the two players.
inline MatrixGameSolution solve_matrix_game(const Matrix& a) {
  const std::size_t m = a.rows();
  const std::size_t l = a.cols();
  if (m == 0 || l == 0) throw MatrixGameError("matrix game must have at least one row and one column");
  for (double v : a.data()) {
    if (!std::isfinite(v)) throw MatrixGameError("matrix game entries must be finite");
  }

  MatrixGameSolution sol;
  sol.row_strategy.assign(m, 0.0);
  sol.col_strategy.assign(l, 0.0);
  if (m == 1) {
    std::size_t best = 0;
    for (std::size_t j = 1; j < l; ++j) {
      if (a(0, j) < a(0, best)) best = j;
    }
    sol.row_strategy[0] = 1.0;
    sol.col_strategy[best] = 1.0;
    sol.value = a(0, best);
    return sol;
  }
  if (l == 1) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < m; ++i) {
      if (a(i, 0) > a(best, 0)) best = i;
    }
    sol.row_strategy[best] = 1.0;
    sol.col_strategy[0] = 1.0;
    sol.value = a(best, 0);
    return sol;
  }

  auto [x, v_row] = detail::solve_row_player(a);
  // The column player's LP (min v s.t. A y <= v) is the row player's LP on -A^T.
  Matrix neg_t(l, m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < l; ++j) neg_t(j, i) = -a(i, j);
  }
  auto [y, neg_v_col] = detail::solve_row_player(neg_t);
  detail::project_to_simplex(x);
  detail::project_to_simplex(y);

  const auto xa = row_mix_payoffs(a, x);
  const auto ay = col_mix_payoffs(a, y);
  const double lower = *std::min_element(xa.begin(), xa.end());
  const double upper = *std::max_element(ay.begin(), ay.end());
  sol.value = v_row;
  sol.row_strategy = std::move(x);
  sol.col_strategy = std::move(y);
  sol.duality_gap = std::max({0.0, upper - lower, std::abs(v_row + neg_v_col)});
  return sol;
}

}  // namespace smg
