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

// JSON and CSV encodings of reports, strategies, and traces.

#pragma once

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include <nlohmann/json.hpp>
#include "smg/matrix_game.hpp"
#include "smg/model.hpp"
#include "smg/shapley.hpp"
#include "smg/simulate.hpp"
#include "smg/solver.hpp"
#include "smg/verify.hpp"

namespace smg {

using Json = nlohmann::ordered_json;

// Shortest decimal that round-trips.
inline std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline std::string format_hash(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline Json certificate_to_json(const AssumptionCertificate& c) {
  Json j;
  j["passed"] = c.passed;
  j["paperParams"] = c.paper_params;
  j["theta"] = c.theta;
  j["delta"] = c.delta;
  j["alpha0"] = c.alpha0;
  j["gamma"] = c.gamma;
  j["eta"] = c.eta;
  j["etaMin"] = c.eta_min;
  j["etaGamma"] = c.eta_gamma;
  j["lambdaMax"] = c.lambda_max;
  j["contractionModulus"] = c.contraction_modulus;
  Json checks = Json::array();
  for (const auto& a : c.checks) checks.push_back({{"name", a.name}, {"pass", a.pass}, {"witness", a.witness}});
  j["checks"] = checks;
  return j;
}

inline Json value_to_json(const GameModel& m, const ValueFunction& v) {
  Json j = Json::object();
  for (std::size_t x = 0; x < m.num_states(); ++x) j[m.states[x]] = v[x];
  return j;
}

// {state: {f: {action: prob}, g: {action: prob}}}
inline Json strategies_to_json(const GameModel& m, const StationaryStrategyPair& pair) {
  Json j = Json::object();
  for (std::size_t x = 0; x < m.num_states(); ++x) {
    Json f = Json::object();
    Json g = Json::object();
    for (std::size_t a = 0; a < pair.f[x].size(); ++a) f[m.blocks[x].actions1[a]] = pair.f[x][a];
    for (std::size_t b = 0; b < pair.g[x].size(); ++b) g[m.blocks[x].actions2[b]] = pair.g[x][b];
    j[m.states[x]] = Json{{"f", f}, {"g", g}};
  }
  return j;
}

// Omitted actions get probability 0; every state must be present.
inline StationaryStrategyPair strategies_from_json(const GameModel& m, const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("malformed strategies document: ") + e.what());
  }
  if (!j.is_object()) throw ParseError("strategies document must be an object");
  StationaryStrategyPair pair;
  for (std::size_t x = 0; x < m.num_states(); ++x) {
    const std::string& s = m.states[x];
    if (!j.contains(s)) throw ParseError("strategies document is missing state '" + s + "'");
    const Json& sj = j[s];
    auto read = [&](const char* key, const std::vector<std::string>& labels) {
      std::vector<double> p(labels.size(), 0.0);
      if (!sj.contains(key) || !sj[key].is_object()) {
        throw ParseError("strategies for state '" + s + "' need an object '" + key + "'");
      }
      for (auto it = sj[key].begin(); it != sj[key].end(); ++it) {
        auto pos = std::find(labels.begin(), labels.end(), it.key());
        if (pos == labels.end()) throw ParseError("unknown action '" + it.key() + "' at state '" + s + "'");
        if (!it.value().is_number()) throw ParseError("strategy probabilities must be numbers");
        p[static_cast<std::size_t>(pos - labels.begin())] = it.value().get<double>();
      }
      return p;
    };
    pair.f.push_back(read("f", m.blocks[x].actions1));
    pair.g.push_back(read("g", m.blocks[x].actions2));
  }
  check_strategy_pair(m, pair);
  return pair;
}

inline Json report_to_json(const GameModel& m, const SolveReport& r) {
  Json j;
  j["value"] = value_to_json(m, r.value);
  j["equilibrium"] = strategies_to_json(m, r.equilibrium);
  j["iterations"] = r.iterations;
  j["stoppingIndex"] = r.stopping_index();
  j["nEpsilonBound"] = r.n_epsilon_bound;
  j["epsilonTarget"] = r.epsilon_target;
  j["epsilonNash"] = r.epsilon_nash;
  j["epsilonTightDiagnostic"] = {{"value", r.epsilon_tight},
                                 {"note", "epsilon*kappa/(1-kappa) with kappa the exact contraction modulus; "
                                          "not the eta*gamma radius"}};
  j["initialResidual"] = r.initial_residual;
  j["worstDualityGap"] = r.worst_duality_gap;
  j["errorTrace"] = r.error_trace;
  j["certificate"] = certificate_to_json(r.certificate);
  return j;
}

// Header `iteration,delta,V_<state>...`, one row per iteration.
inline std::string trace_to_csv(const GameModel& m, const SolveReport& r) {
  std::ostringstream os;
  os << "iteration,delta";
  for (const auto& s : m.states) os << ",V_" << s;
  os << "\n";
  for (std::size_t k = 0; k < r.error_trace.size(); ++k) {
    os << (k + 1) << "," << format_double(r.error_trace[k]);
    if (k < r.value_trace.size()) {
      for (double v : r.value_trace[k].values) os << "," << format_double(v);
    }
    os << "\n";
  }
  return os.str();
}

inline Json estimate_to_json(const MCEstimate& e) {
  Json j;
  j["mean"] = e.mean;
  j["stdError"] = e.std_error;
  j["trajectories"] = e.trajectories;
  j["truncationBound"] = e.truncation_bound;
  j["seed"] = e.seed;
  return j;
}

inline Json game_solution_to_json(const MatrixGameSolution& s) {
  Json j;
  j["value"] = s.value;
  j["rowStrategy"] = s.row_strategy;
  j["colStrategy"] = s.col_strategy;
  j["dualityGap"] = s.duality_gap;
  return j;
}

// A JSON array of equal-length numeric arrays.
inline Matrix matrix_from_json(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("malformed matrix: ") + e.what());
  }
  if (!j.is_array() || j.empty()) throw ParseError("matrix must be a nonempty array of rows");
  const std::size_t cols = j.front().is_array() ? j.front().size() : 0;
  if (cols == 0) throw ParseError("matrix rows must be nonempty arrays");
  Matrix a(j.size(), cols);
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_array() || j[i].size() != cols) throw ParseError("matrix rows must all have the same length");
    for (std::size_t k = 0; k < cols; ++k) {
      if (!j[i][k].is_number()) throw ParseError("matrix entries must be numbers");
      a(i, k) = j[i][k].get<double>();
    }
  }
  return a;
}

}  // namespace smg
