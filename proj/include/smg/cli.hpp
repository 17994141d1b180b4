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

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "smg/io.hpp"
#include "smg/model.hpp"
#include "smg/shapley.hpp"
#include "smg/simulate.hpp"
#include "smg/solver.hpp"
#include "smg/verify.hpp"

namespace smg::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kInputError = 2,
  kCertificateFailure = 3,
  kNoConvergence = 4,
};

struct RunConfig {
  std::string subcommand;  // check | solve | eval | simulate | game
  std::string model_path;
  std::string matrix;  // game: inline JSON or a path
  double epsilon = 1e-6;
  std::optional<double> v0;
  std::string v0_file;
  std::size_t max_iter = 0;
  std::uint64_t seed = 1;
  std::size_t trajectories = 10000;
  std::string state;            // simulate: initial state; empty = every state
  std::string strategies_in;    // eval / simulate
  std::string report_out;       // JSON report; empty = stdout
  std::string trace_out;        // solve: CSV trace
  std::string strategies_out;   // solve: strategies JSON
  bool paper_params = false;
  PaperParams paper;
  double discount_floor = 1e-8;
  unsigned threads = 0;
};

class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << text;
}

inline Json config_to_json(const RunConfig& c) {
  Json j;
  j["subcommand"] = c.subcommand;
  if (!c.model_path.empty()) j["model"] = c.model_path;
  if (c.subcommand == "game") j["matrix"] = c.matrix;
  if (c.subcommand == "solve") {
    j["epsilon"] = c.epsilon;
    if (c.v0) j["v0"] = *c.v0;
    if (!c.v0_file.empty()) j["v0File"] = c.v0_file;
    j["maxIter"] = c.max_iter;
  }
  if (c.subcommand == "check" || c.subcommand == "solve") {
    j["paperParams"] = c.paper_params;
    if (c.paper_params) {
      j["k1"] = c.paper.k1;
      j["k2"] = c.paper.k2;
      j["alpha0"] = c.paper.alpha0;
      j["delta"] = c.paper.delta;
    }
  }
  if (c.subcommand == "eval" || c.subcommand == "simulate") j["strategies"] = c.strategies_in;
  if (c.subcommand == "simulate") {
    j["seed"] = c.seed;
    j["trajectories"] = c.trajectories;
    j["discountFloor"] = c.discount_floor;
    if (!c.state.empty()) j["state"] = c.state;
  }
  return j;
}

namespace detail {

inline void emit(const RunConfig& c, const Json& j, std::ostream& out) {
  const std::string text = j.dump(2) + "\n";
  if (c.report_out.empty()) {
    out << text;
  } else {
    write_file(c.report_out, text);
  }
}

inline Json stamped(const RunConfig& c, const GameModel* m) {
  Json j;
  j["config"] = config_to_json(c);
  if (m) j["modelHash"] = format_hash(model_hash(*m));
  return j;
}

inline ValueFunction initial_value(const RunConfig& c, const GameModel& m) {
  if (!c.v0_file.empty()) {
    Json j;
    try {
      j = Json::parse(read_file(c.v0_file));
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(std::string("malformed v0 file: ") + e.what());
    }
    ValueFunction v(std::vector<double>(m.num_states(), 0.0));
    for (std::size_t x = 0; x < m.num_states(); ++x) {
      if (!j.contains(m.states[x]) || !j[m.states[x]].is_number()) {
        throw ParseError("v0 file needs a number for state '" + m.states[x] + "'");
      }
      v[x] = j[m.states[x]].get<double>();
    }
    return v;
  }
  return ValueFunction::constant(m.num_states(), c.v0.value_or(0.0));
}

inline CertificateOptions certificate_options(const RunConfig& c) { return {c.paper_params, c.paper}; }

inline int run_check(const RunConfig& c, const GameModel& m, std::ostream& out) {
  const AssumptionCertificate cert = check_assumptions(m, certificate_options(c));
  Json j = stamped(c, &m);
  j["certificate"] = certificate_to_json(cert);
  emit(c, j, out);
  return cert.passed ? kOk : kCertificateFailure;
}

inline int run_solve(const RunConfig& c, const GameModel& m, std::ostream& out, std::ostream& err) {
  SolveOptions opts;
  opts.epsilon = c.epsilon;
  opts.v0 = initial_value(c, m);
  opts.max_iterations = c.max_iter;
  opts.certificate = certificate_options(c);
  SolveReport rep;
  int code = kOk;
  try {
    rep = value_iterate(m, opts);
  } catch (const CertificateError& e) {
    Json j = stamped(c, &m);
    j["error"] = e.what();
    j["certificate"] = certificate_to_json(e.certificate());
    emit(c, j, out);
    err << "smg: " << e.what() << "\n";
    return kCertificateFailure;
  } catch (const ConvergenceError& e) {
    rep = e.partial();
    code = kNoConvergence;
    err << "smg: " << e.what() << "\n";
  }
  Json j = stamped(c, &m);
  j["converged"] = code == kOk;
  const Json body = report_to_json(m, rep);
  for (auto it = body.begin(); it != body.end(); ++it) j[it.key()] = it.value();
  const double tol = 2.0 * rep.epsilon_nash;
  const SolutionCertificate sc = certify_solution(m, rep, tol);
  j["solutionCheck"] = {{"tolerance", tol}, {"pass", sc.pass}, {"worstViolation", sc.worst_violation},
                        {"pairValue", value_to_json(m, sc.pair_value)}};
  emit(c, j, out);
  if (!c.trace_out.empty()) write_file(c.trace_out, trace_to_csv(m, rep));
  if (!c.strategies_out.empty()) write_file(c.strategies_out, strategies_to_json(m, rep.equilibrium).dump(2) + "\n");
  return code;
}

inline int run_eval(const RunConfig& c, const GameModel& m, std::ostream& out) {
  if (c.strategies_in.empty()) throw InputError("eval needs --strategies");
  const StationaryStrategyPair pair = strategies_from_json(m, read_file(c.strategies_in));
  const ValueFunction v = evaluate_stationary_pair(m, pair);
  const ShapleyOperator op(m);
  Json j = stamped(c, &m);
  j["value"] = value_to_json(m, v);
  j["fixedPointResidual"] = weighted_distance(op.apply_pair(pair, v), v, op.weight());
  const SolutionCertificate sc = certify_solution(m, pair, 0.0);
  j["worstDeviationGain"] = sc.worst_violation;
  emit(c, j, out);
  return kOk;
}

inline int run_simulate(const RunConfig& c, const GameModel& m, std::ostream& out) {
  if (c.strategies_in.empty()) throw InputError("simulate needs --strategies");
  if (c.trajectories < 2) throw InputError("simulate needs at least two trajectories");
  const StationaryStrategyPair pair = strategies_from_json(m, read_file(c.strategies_in));
  const SimulationOptions sopts{c.discount_floor, c.threads};
  Json j = stamped(c, &m);
  if (!c.state.empty()) {
    const auto x = m.state_index(c.state);
    if (!x) throw InputError("unknown state '" + c.state + "'");
    const Json e = estimate_to_json(estimate_value(m, pair, *x, c.trajectories, c.seed, sopts));
    for (auto it = e.begin(); it != e.end(); ++it) j[it.key()] = it.value();
  } else {
    Json all = Json::object();
    for (std::size_t x = 0; x < m.num_states(); ++x) {
      all[m.states[x]] = estimate_to_json(estimate_value(m, pair, x, c.trajectories, c.seed, sopts));
    }
    j["estimates"] = all;
  }
  emit(c, j, out);
  return kOk;
}

inline int run_game(const RunConfig& c, std::ostream& out) {
  std::string text = c.matrix;
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string::npos || text[first] != '[') text = read_file(c.matrix);
  const MatrixGameSolution sol = solve_matrix_game(matrix_from_json(text));
  Json j = stamped(c, nullptr);
  const Json body = game_solution_to_json(sol);
  for (auto it = body.begin(); it != body.end(); ++it) j[it.key()] = it.value();
  emit(c, j, out);
  return kOk;
}

}  // namespace detail

// Runs one subcommand; artifacts go to the configured paths (reports default to `out`).
inline int run(const RunConfig& c, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  try {
    if (c.subcommand == "game") return detail::run_game(c, out);
    if (!(c.epsilon > 0.0)) throw InputError("epsilon must be positive");
    const GameModel m = load_model(read_file(c.model_path));
    if (c.subcommand == "check") return detail::run_check(c, m, out);
    if (c.subcommand == "solve") return detail::run_solve(c, m, out, err);
    if (c.subcommand == "eval") return detail::run_eval(c, m, out);
    if (c.subcommand == "simulate") return detail::run_simulate(c, m, out);
    err << "smg: unknown subcommand '" << c.subcommand << "'\n";
    return kUsage;
  } catch (const ValidationError& e) {
    err << "smg: " << e.what() << "\n";
    return kInputError;
  } catch (const ParseError& e) {
    err << "smg: " << e.what() << "\n";
    return kInputError;
  } catch (const InputError& e) {
    err << "smg: " << e.what() << "\n";
    return kInputError;
  } catch (const std::invalid_argument& e) {
    err << "smg: " << e.what() << "\n";
    return kInputError;
  } catch (const MatrixGameError& e) {
    err << "smg: " << e.what() << "\n";
    return kInputError;
  }
}

}  // namespace smg::cli
