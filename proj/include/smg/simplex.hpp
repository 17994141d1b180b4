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
#include <limits>
#include <stdexcept>
#include <vector>

#include "smg/linalg.hpp"

namespace smg::lp {

enum class Sense { kLessEqual, kGreaterEqual, kEqual };

struct Constraint {
  std::vector<double> coeffs;
  Sense sense = Sense::kLessEqual;
  double rhs = 0.0;
};

// minimize c.x subject to the constraints and x >= 0.
struct LinearProgram {
  std::vector<double> objective;
  std::vector<Constraint> constraints;
};

enum class Status { kOptimal, kInfeasible, kUnbounded, kIterationLimit };

struct Result {
  Status status = Status::kOptimal;
  std::vector<double> x;
  double objective = 0.0;
  std::size_t pivots = 0;
};

struct Options {
  double pivot_tol = 1e-11;
  double optimality_tol = 1e-11;
  double feasibility_tol = 1e-9;
  std::size_t max_pivots = 100000;
};

// Dense two-phase primal simplex on a full tableau. Bland's rule picks both the
// entering column (lowest index with negative reduced cost) and the leaving row
// (lowest basic index among min-ratio ties), so runs are deterministic and
// cannot cycle.
class TwoPhaseSimplex {
 public:
  explicit TwoPhaseSimplex(Options opts = {}) : opts_(opts) {}

  Result solve(const LinearProgram& lp) {
    build(lp);
    Result res;

    // Phase 1: drive the artificial variables to zero.
    std::vector<double> phase1(num_cols_, 0.0);
    for (std::size_t j = first_artificial_; j < num_cols_; ++j) phase1[j] = 1.0;
    Status st = optimize(phase1, res.pivots);
    if (st == Status::kIterationLimit) {
      res.status = st;
      return res;
    }
    if (objective_value(phase1) > opts_.feasibility_tol * std::max(1.0, rhs_scale_)) {
      res.status = Status::kInfeasible;
      return res;
    }
    evict_artificials(res.pivots);
    for (std::size_t j = first_artificial_; j < num_cols_; ++j) excluded_[j] = true;

    std::vector<double> phase2(num_cols_, 0.0);
    for (std::size_t j = 0; j < lp.objective.size(); ++j) phase2[j] = lp.objective[j];
    st = optimize(phase2, res.pivots);
    res.status = st;
    if (st != Status::kOptimal) return res;

    res.x.assign(num_vars_, 0.0);
    for (std::size_t i = 0; i < basis_.size(); ++i) {
      if (basis_[i] < num_vars_) res.x[basis_[i]] = std::max(0.0, tableau_(i, num_cols_));
    }
    res.objective = 0.0;
    for (std::size_t j = 0; j < num_vars_; ++j) res.objective += lp.objective[j] * res.x[j];
    return res;
  }

 private:
  void build(const LinearProgram& lp) {
    num_vars_ = lp.objective.size();
    const std::size_t m = lp.constraints.size();
    std::size_t slack = 0;
    std::size_t artificial = 0;
    std::vector<Sense> senses(m);
    std::vector<double> sign(m, 1.0);
    rhs_scale_ = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const Constraint& c = lp.constraints[i];
      if (c.coeffs.size() != num_vars_) throw std::invalid_argument("constraint width does not match objective");
      Sense s = c.sense;
      if (c.rhs < 0) {
        sign[i] = -1.0;
        if (s == Sense::kLessEqual) {
          s = Sense::kGreaterEqual;
        } else if (s == Sense::kGreaterEqual) {
          s = Sense::kLessEqual;
        }
      }
      senses[i] = s;
      if (s != Sense::kEqual) ++slack;
      if (s != Sense::kLessEqual) ++artificial;
      rhs_scale_ = std::max(rhs_scale_, std::abs(c.rhs));
    }
    first_artificial_ = num_vars_ + slack;
    num_cols_ = first_artificial_ + artificial;
    tableau_ = Matrix(m, num_cols_ + 1);
    basis_.assign(m, 0);
    excluded_.assign(num_cols_, false);

    std::size_t next_slack = num_vars_;
    std::size_t next_art = first_artificial_;
    for (std::size_t i = 0; i < m; ++i) {
      const Constraint& c = lp.constraints[i];
      for (std::size_t j = 0; j < num_vars_; ++j) tableau_(i, j) = sign[i] * c.coeffs[j];
      tableau_(i, num_cols_) = sign[i] * c.rhs;
      switch (senses[i]) {
        case Sense::kLessEqual:
          tableau_(i, next_slack) = 1.0;
          basis_[i] = next_slack++;
          break;
        case Sense::kGreaterEqual:
          tableau_(i, next_slack++) = -1.0;
          tableau_(i, next_art) = 1.0;
          basis_[i] = next_art++;
          break;
        case Sense::kEqual:
          tableau_(i, next_art) = 1.0;
          basis_[i] = next_art++;
          break;
      }
    }
  }

  double objective_value(const std::vector<double>& cost) const {
    double z = 0.0;
    for (std::size_t i = 0; i < basis_.size(); ++i) z += cost[basis_[i]] * tableau_(i, num_cols_);
    return z;
  }

  double reduced_cost(const std::vector<double>& cost, std::size_t j) const {
    double r = cost[j];
    for (std::size_t i = 0; i < basis_.size(); ++i) r -= cost[basis_[i]] * tableau_(i, j);
    return r;
  }

  void pivot(std::size_t row, std::size_t col) {
    const double p = tableau_(row, col);
    auto pr = tableau_.row(row);
    for (double& v : pr) v /= p;
    pr[col] = 1.0;
    for (std::size_t i = 0; i < tableau_.rows(); ++i) {
      if (i == row) continue;
      const double f = tableau_(i, col);
      if (f == 0.0) continue;
      auto ri = tableau_.row(i);
      for (std::size_t j = 0; j <= num_cols_; ++j) ri[j] -= f * pr[j];
      ri[col] = 0.0;
    }
    basis_[row] = col;
  }

  Status optimize(const std::vector<double>& cost, std::size_t& pivots) {
    for (;;) {
      if (pivots >= opts_.max_pivots) return Status::kIterationLimit;
      std::size_t enter = num_cols_;
      for (std::size_t j = 0; j < num_cols_; ++j) {
        if (excluded_[j]) continue;
        if (reduced_cost(cost, j) < -opts_.optimality_tol) {
          enter = j;
          break;
        }
      }
      if (enter == num_cols_) return Status::kOptimal;

      std::size_t leave = basis_.size();
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < basis_.size(); ++i) {
        const double a = tableau_(i, enter);
        if (a <= opts_.pivot_tol) continue;
        const double ratio = std::max(0.0, tableau_(i, num_cols_)) / a;
        if (leave == basis_.size()) {
          best = ratio;
          leave = i;
          continue;
        }
        const double tie = 1e-15 * std::max(1.0, best);
        if (ratio < best - tie || (std::abs(ratio - best) <= tie && basis_[i] < basis_[leave])) {
          best = ratio;
          leave = i;
        }
      }
      if (leave == basis_.size()) return Status::kUnbounded;
      pivot(leave, enter);
      ++pivots;
    }
  }

  // Pivots zero-level artificials out of the basis; rows with no usable pivot are
  // linearly dependent and are dropped.
  void evict_artificials(std::size_t& pivots) {
    for (std::size_t i = 0; i < basis_.size();) {
      if (basis_[i] < first_artificial_) {
        ++i;
        continue;
      }
      std::size_t col = first_artificial_;
      for (std::size_t j = 0; j < first_artificial_; ++j) {
        if (std::abs(tableau_(i, j)) > opts_.pivot_tol) {
          col = j;
          break;
        }
      }
      if (col < first_artificial_) {
        pivot(i, col);
        ++pivots;
        ++i;
      } else {
        drop_row(i);
      }
    }
  }

  void drop_row(std::size_t r) {
    Matrix t(tableau_.rows() - 1, tableau_.cols());
    for (std::size_t i = 0, k = 0; i < tableau_.rows(); ++i) {
      if (i == r) continue;
      for (std::size_t j = 0; j < tableau_.cols(); ++j) t(k, j) = tableau_(i, j);
      ++k;
    }
    tableau_ = std::move(t);
    basis_.erase(basis_.begin() + static_cast<std::ptrdiff_t>(r));
  }

  Options opts_;
  Matrix tableau_;
  std::vector<std::size_t> basis_;
  std::vector<bool> excluded_;
  std::size_t num_vars_ = 0;
  std::size_t num_cols_ = 0;
  std::size_t first_artificial_ = 0;
  double rhs_scale_ = 0.0;
};

inline Result solve(const LinearProgram& lp, Options opts = {}) { return TwoPhaseSimplex(opts).solve(lp); }

}  // namespace smg::lp
