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
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "smg/model.hpp"
#include "smg/shapley.hpp"
#include "smg/verify.hpp"

namespace smg {

struct SolveReport {
  ValueFunction value;                  // V_eps, the last iterate
  StationaryStrategyPair equilibrium;   // saddle strategies of the last iteration
  std::size_t iterations = 0;           // operator applications performed
  std::vector<double> error_trace;      // Delta_k = ||V_k - V_{k-1}||_omega, k = 1..iterations
  std::vector<ValueFunction> value_trace;  // V_k, k = 1..iterations
  double epsilon_target = 0.0;
  double epsilon_nash = 0.0;             // epsilon / (1 - eta gamma)
  double epsilon_tight = 0.0;            // epsilon kappa / (1 - kappa), kappa the exact modulus; diagnostic only
  double initial_residual = 0.0;         // ||T V0 - V0||_omega
  std::int64_t n_epsilon_bound = 0;
  double worst_duality_gap = 0.0;
  AssumptionCertificate certificate;

  // Index n of the iterate V_n at which ||V_{n+1} - V_n||_omega first fell below epsilon.
  std::size_t stopping_index() const { return iterations == 0 ? 0 : iterations - 1; }
};

class ConvergenceError : public std::runtime_error {
 public:
  explicit ConvergenceError(SolveReport partial)
      : std::runtime_error("value iteration did not converge within the iteration limit"),
        partial_(std::move(partial)) {}
  const SolveReport& partial() const { return partial_; }

 private:
  SolveReport partial_;
};

// N_eps = (1 + floor(log_{eta gamma}(eps / residual))) when residual > 0, else 0.
// Clamped at zero when the first step already meets the threshold.
inline std::int64_t iteration_bound_from(double residual, double eta_gamma, double epsilon) {
  if (!(eta_gamma > 0.0 && eta_gamma < 1.0)) throw std::domain_error("iteration bound needs 0 < eta*gamma < 1");
  if (!(epsilon > 0.0)) throw std::domain_error("iteration bound needs epsilon > 0");
  if (residual <= 1e-14) return 0;
  const double steps = std::floor(std::log(epsilon / residual) / std::log(eta_gamma));
  return std::max<std::int64_t>(0, 1 + static_cast<std::int64_t>(steps));
}

inline std::int64_t iteration_bound(const GameModel& m, double epsilon, const ValueFunction& v0,
                                    const AssumptionCertificate& cert) {
  if (!cert.passed) throw CertificateError(cert);
  const ShapleyOperator op(m);
  const double residual = weighted_distance(op.apply(v0).value, v0, op.weight());
  return iteration_bound_from(residual, cert.eta_gamma, epsilon);
}

inline std::int64_t iteration_bound(const GameModel& m, double epsilon, const ValueFunction& v0) {
  return iteration_bound(m, epsilon, v0, check_assumptions(m));
}

struct SolveOptions {
  double epsilon = 1e-6;
  std::optional<ValueFunction> v0;  // defaults to 0
  std::size_t max_iterations = 0;   // 0 selects 10 N_eps, capped at 1e6
  CertificateOptions certificate;
  bool keep_value_trace = true;
};

inline constexpr std::size_t kMaxIterationCap = 1000000;

// Value iteration V_{n+1} = T V_n, stopping at the first n with
// ||V_{n+1} - V_n||_omega < epsilon.
inline SolveReport value_iterate(const GameModel& m, const SolveOptions& opts) {
  if (!(opts.epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
  SolveReport rep;
  rep.certificate = check_assumptions(m, opts.certificate);
  if (!rep.certificate.passed) throw CertificateError(rep.certificate);

  const ShapleyOperator op(m);
  ValueFunction v = opts.v0.value_or(ValueFunction::constant(m.num_states(), 0.0));
  if (v.size() != m.num_states()) throw std::invalid_argument("initial value has the wrong length");

  rep.epsilon_target = opts.epsilon;
  rep.epsilon_nash = opts.epsilon / (1.0 - rep.certificate.eta_gamma);
  const double kappa = rep.certificate.contraction_modulus;
  rep.epsilon_tight = opts.epsilon * kappa / (1.0 - kappa);

  auto step = op.apply(v);
  rep.initial_residual = weighted_distance(step.value, v, op.weight());
  rep.n_epsilon_bound = iteration_bound_from(rep.initial_residual, rep.certificate.eta_gamma, opts.epsilon);

  std::size_t limit = opts.max_iterations;
  if (limit == 0) {
    const auto n = static_cast<std::size_t>(std::min<std::int64_t>(rep.n_epsilon_bound, kMaxIterationCap));
    limit = std::min(std::max(10 * n, n + 1), kMaxIterationCap);
  }

  for (;;) {
    const double delta = weighted_distance(step.value, v, op.weight());
    ++rep.iterations;
    rep.error_trace.push_back(delta);
    rep.worst_duality_gap = std::max(rep.worst_duality_gap, step.worst_duality_gap);
    v = std::move(step.value);
    rep.equilibrium = std::move(step.equilibrium);
    if (opts.keep_value_trace) rep.value_trace.push_back(v);
    if (delta < opts.epsilon) break;
    if (rep.iterations >= limit) {
      rep.value = v;
      throw ConvergenceError(std::move(rep));
    }
    step = op.apply(v);
  }
  rep.value = std::move(v);
  return rep;
}

inline SolveReport value_iterate(const GameModel& m, double epsilon, const ValueFunction& v0,
                                 std::size_t max_iterations = 0) {
  SolveOptions opts;
  opts.epsilon = epsilon;
  opts.v0 = v0;
  opts.max_iterations = max_iterations;
  return value_iterate(m, opts);
}

struct SolutionCertificate {
  bool pass = false;
  double worst_violation = 0.0;
  std::vector<double> per_state;  // largest one-shot deviation gain at each state
  ValueFunction pair_value;       // exact value of the reported pair
};

// Evaluates the reported pair exactly and checks that no player gains more than
// tol from a one-shot pure deviation at any state against C(V, x).
inline SolutionCertificate certify_solution(const GameModel& m, const StationaryStrategyPair& pair, double tol) {
  const ShapleyOperator op(m);
  SolutionCertificate out;
  out.pair_value = op.evaluate_pair(pair);
  out.per_state.assign(m.num_states(), 0.0);
  for (std::size_t x = 0; x < m.num_states(); ++x) {
    const Matrix c = op.payoff_matrix(out.pair_value, x);
    double worst = -std::numeric_limits<double>::infinity();
    for (double r : col_mix_payoffs(c, pair.g[x])) worst = std::max(worst, r - out.pair_value[x]);
    for (double r : row_mix_payoffs(c, pair.f[x])) worst = std::max(worst, out.pair_value[x] - r);
    out.per_state[x] = worst;
  }
  out.worst_violation = *std::max_element(out.per_state.begin(), out.per_state.end());
  out.pass = out.worst_violation <= tol;
  return out;
}

inline SolutionCertificate certify_solution(const GameModel& m, const SolveReport& report, double tol) {
  return certify_solution(m, report.equilibrium, tol);
}

}  // namespace smg
