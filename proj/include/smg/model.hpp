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
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

namespace smg {

// Sojourn-time laws. Parameters are in time units except Exponential::rate,
// which is per unit time.
struct Exponential {
  double rate = 1.0;
  bool operator==(const Exponential&) const = default;
};

// Uniform on [0, upper].
struct Uniform {
  double upper = 1.0;
  bool operator==(const Uniform&) const = default;
};

struct Deterministic {
  double duration = 1.0;
  bool operator==(const Deterministic&) const = default;
};

// Pre-integrated coefficients for an arbitrary holding-time law:
// reward_weight = int e^{-at}(1-H(t))dt, continuation = int e^{-at}H(dt).
struct DirectWeights {
  double reward_weight = 0.0;
  double continuation = 0.0;
  bool operator==(const DirectWeights&) const = default;
};

using SojournLaw = std::variant<Exponential, Uniform, Deterministic, DirectWeights>;

inline bool is_analytic(const SojournLaw& law) {
  return !std::holds_alternative<DirectWeights>(law);
}

// Data attached to one (state, a, b) triple.
struct TripleData {
  double alpha = 1.0;   // discount rate per unit time
  double reward = 0.0;  // reward rate to player 1
  SojournLaw sojourn = Exponential{};
  std::vector<double> transition;  // dense, indexed by state

  bool operator==(const TripleData&) const = default;
};

// Per-state action sets and the row-major (a, b) block of triples.
struct StateBlock {
  std::vector<std::string> actions1;
  std::vector<std::string> actions2;
  std::vector<TripleData> triples;  // size actions1.size() * actions2.size()

  std::size_t rows() const { return actions1.size(); }
  std::size_t cols() const { return actions2.size(); }
  const TripleData& at(std::size_t a, std::size_t b) const { return triples.at(a * cols() + b); }
  TripleData& at(std::size_t a, std::size_t b) { return triples.at(a * cols() + b); }

  bool operator==(const StateBlock&) const = default;
};

// A finite semi-Markov game with a factorized kernel Q(t,y|x,a,b) = H(t|x,a,b) p(y|x,a,b).
struct GameModel {
  std::vector<std::string> states;
  std::vector<StateBlock> blocks;  // parallel to states
  std::vector<double> weight;      // omega(x) >= 1, parallel to states

  std::size_t num_states() const { return states.size(); }

  std::optional<std::size_t> state_index(const std::string& label) const {
    for (std::size_t i = 0; i < states.size(); ++i) {
      if (states[i] == label) return i;
    }
    return std::nullopt;
  }

  bool unit_weight() const {
    for (double w : weight) {
      if (w != 1.0) return false;
    }
    return true;
  }

  bool operator==(const GameModel&) const = default;
};

struct TripleRef {
  std::size_t state = 0;
  std::size_t a = 0;
  std::size_t b = 0;
  bool operator==(const TripleRef&) const = default;
};

struct Violation {
  std::string message;
  std::string state;  // empty when not tied to a state
  std::string a;
  std::string b;

  std::string describe() const {
    std::string out = message;
    if (!state.empty()) {
      out += " at state '" + state + "'";
      if (!a.empty() || !b.empty()) out += " (a='" + a + "', b='" + b + "')";
    }
    return out;
  }
};

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(std::vector<Violation> violations)
      : std::runtime_error("invalid model: " + violations.front().describe()),
        violations_(std::move(violations)) {}
  const std::vector<Violation>& violations() const { return violations_; }

 private:
  std::vector<Violation> violations_;
};

namespace detail {

inline constexpr double kTransitionSumTol = 1e-12;
inline constexpr double kDirectWeightsRelTol = 1e-9;

inline std::string sojourn_kind(const SojournLaw& law) {
  struct Visitor {
    std::string operator()(const Exponential&) const { return "exponential"; }
    std::string operator()(const Uniform&) const { return "uniform"; }
    std::string operator()(const Deterministic&) const { return "deterministic"; }
    std::string operator()(const DirectWeights&) const { return "direct"; }
  };
  return std::visit(Visitor{}, law);
}

}  // namespace detail

// Returns every invariant violation; empty iff the model is valid.
inline std::vector<Violation> validate_model(const GameModel& m) {
  std::vector<Violation> out;
  const std::size_t n = m.num_states();
  if (n == 0) {
    out.push_back({"model must have at least one state", "", "", ""});
    return out;
  }
  std::unordered_map<std::string, int> seen;
  for (const auto& s : m.states) {
    if (++seen[s] == 2) out.push_back({"duplicate state label", s, "", ""});
  }
  if (m.blocks.size() != n) {
    out.push_back({"action blocks must match the number of states", "", "", ""});
    return out;
  }
  if (m.weight.size() != n) {
    out.push_back({"weight must have one entry per state", "", "", ""});
  } else {
    for (std::size_t x = 0; x < n; ++x) {
      if (!(m.weight[x] >= 1.0) || !std::isfinite(m.weight[x])) {
        out.push_back({"weight must be >= 1", m.states[x], "", ""});
      }
    }
  }
  for (std::size_t x = 0; x < n; ++x) {
    const StateBlock& blk = m.blocks[x];
    const std::string& sx = m.states[x];
    if (blk.actions1.empty()) out.push_back({"player 1 action set must be nonempty", sx, "", ""});
    if (blk.actions2.empty()) out.push_back({"player 2 action set must be nonempty", sx, "", ""});
    if (blk.triples.size() != blk.rows() * blk.cols()) {
      out.push_back({"every (a, b) pair must have exactly one triple", sx, "", ""});
      continue;
    }
    for (std::size_t i = 0; i < blk.rows(); ++i) {
      for (std::size_t j = 0; j < blk.cols(); ++j) {
        const TripleData& t = blk.at(i, j);
        auto flag = [&](std::string msg) {
          out.push_back({std::move(msg), sx, blk.actions1[i], blk.actions2[j]});
        };
        if (!(t.alpha > 0.0) || !std::isfinite(t.alpha)) flag("discount must be positive");
        if (!std::isfinite(t.reward)) flag("payoff must be finite");
        if (t.transition.size() != n) {
          flag("transition vector must have one entry per state");
        } else {
          double sum = 0.0;
          bool negative = false;
          for (double p : t.transition) {
            if (!(p >= 0.0) || !std::isfinite(p)) negative = true;
            sum += p;
          }
          if (negative) flag("transition probabilities must be nonnegative");
          if (!(std::abs(sum - 1.0) <= detail::kTransitionSumTol)) {
            std::ostringstream os;
            os.precision(17);
            os << "transition row must sum to 1 (sums to " << sum << ")";
            flag(os.str());
          }
        }
        std::visit(
            [&](const auto& law) {
              using L = std::decay_t<decltype(law)>;
              if constexpr (std::is_same_v<L, Exponential>) {
                if (!(law.rate > 0.0) || !std::isfinite(law.rate)) flag("sojourn rate must be positive");
              } else if constexpr (std::is_same_v<L, Uniform>) {
                if (!(law.upper > 0.0) || !std::isfinite(law.upper)) flag("sojourn upper bound must be positive");
              } else if constexpr (std::is_same_v<L, Deterministic>) {
                if (!(law.duration > 0.0) || !std::isfinite(law.duration)) {
                  flag("sojourn duration must be positive");
                }
              } else {
                const double d = law.reward_weight;
                const double lam = law.continuation;
                if (!(lam > 0.0 && lam < 1.0)) flag("direct continuation weight must lie in (0, 1)");
                if (!(d >= 0.0) || !std::isfinite(d)) flag("direct reward weight must be nonnegative");
                if (t.alpha > 0.0) {
                  const double expected = (1.0 - lam) / t.alpha;
                  const double scale = std::max(std::abs(d), std::abs(expected));
                  if (!(std::abs(d - expected) <= detail::kDirectWeightsRelTol * std::max(scale, 1e-300))) {
                    flag("direct weights must satisfy d = (1 - lambda) / alpha");
                  }
                }
              }
            },
            t.sojourn);
      }
    }
  }
  return out;
}

// Minimum discount rate over all triples.
inline double min_alpha(const GameModel& m) {
  double lo = std::numeric_limits<double>::infinity();
  for (const auto& blk : m.blocks) {
    for (const auto& t : blk.triples) lo = std::min(lo, t.alpha);
  }
  return lo;
}

inline nlohmann::ordered_json sojourn_to_json(const SojournLaw& law) {
  nlohmann::ordered_json j;
  j["kind"] = detail::sojourn_kind(law);
  std::visit(
      [&](const auto& l) {
        using L = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<L, Exponential>) {
          j["rate"] = l.rate;
        } else if constexpr (std::is_same_v<L, Uniform>) {
          j["upper"] = l.upper;
        } else if constexpr (std::is_same_v<L, Deterministic>) {
          j["duration"] = l.duration;
        } else {
          j["d"] = l.reward_weight;
          j["lambda"] = l.continuation;
        }
      },
      law);
  return j;
}

inline nlohmann::ordered_json model_to_json(const GameModel& m) {
  using nlohmann::ordered_json;
  ordered_json doc;
  doc["states"] = m.states;
  ordered_json a1 = ordered_json::object();
  ordered_json a2 = ordered_json::object();
  ordered_json w = ordered_json::object();
  for (std::size_t x = 0; x < m.num_states(); ++x) {
    a1[m.states[x]] = m.blocks[x].actions1;
    a2[m.states[x]] = m.blocks[x].actions2;
    w[m.states[x]] = m.weight[x];
  }
  doc["actions1"] = a1;
  doc["actions2"] = a2;
  doc["weight"] = w;
  ordered_json triples = ordered_json::array();
  for (std::size_t x = 0; x < m.num_states(); ++x) {
    const StateBlock& blk = m.blocks[x];
    for (std::size_t i = 0; i < blk.rows(); ++i) {
      for (std::size_t j = 0; j < blk.cols(); ++j) {
        const TripleData& t = blk.at(i, j);
        ordered_json tj;
        tj["state"] = m.states[x];
        tj["a"] = blk.actions1[i];
        tj["b"] = blk.actions2[j];
        tj["alpha"] = t.alpha;
        tj["reward"] = t.reward;
        tj["sojourn"] = sojourn_to_json(t.sojourn);
        ordered_json tr = ordered_json::object();
        for (std::size_t y = 0; y < t.transition.size(); ++y) {
          if (t.transition[y] != 0.0) tr[m.states[y]] = t.transition[y];
        }
        tj["transition"] = tr;
        triples.push_back(std::move(tj));
      }
    }
  }
  doc["triples"] = triples;
  return doc;
}

inline std::string serialize_model(const GameModel& m) { return model_to_json(m).dump(2) + "\n"; }

namespace detail {

template <typename Json>
double number_field(const Json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key)) throw ParseError(where + ": missing field '" + key + "'");
  const auto& v = obj.at(key);
  if (!v.is_number()) throw ParseError(where + ": field '" + key + "' must be a number");
  return v.template get<double>();
}

template <typename Json>
std::string string_field(const Json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key)) throw ParseError(where + ": missing field '" + key + "'");
  const auto& v = obj.at(key);
  if (!v.is_string()) throw ParseError(where + ": field '" + key + "' must be a string");
  return v.template get<std::string>();
}

template <typename Json>
SojournLaw parse_sojourn(const Json& j, const std::string& where) {
  if (!j.is_object()) throw ParseError(where + ": sojourn must be an object");
  const std::string kind = string_field(j, "kind", where);
  if (kind == "exponential") return Exponential{number_field(j, "rate", where)};
  if (kind == "uniform") return Uniform{number_field(j, "upper", where)};
  if (kind == "deterministic") return Deterministic{number_field(j, "duration", where)};
  if (kind == "direct") return DirectWeights{number_field(j, "d", where), number_field(j, "lambda", where)};
  throw ParseError(where + ": unknown sojourn kind '" + kind + "'");
}

template <typename Json>
std::vector<std::string> label_array(const Json& j, const std::string& where) {
  if (!j.is_array()) throw ParseError(where + " must be an array of strings");
  std::vector<std::string> out;
  for (const auto& e : j) {
    if (!e.is_string()) throw ParseError(where + " must be an array of strings");
    out.push_back(e.template get<std::string>());
  }
  return out;
}

}  // namespace detail

// Parses a model document without validating the model invariants.
inline GameModel parse_model(const std::string& text) {
  using nlohmann::ordered_json;
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("malformed model document: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("model document must be a JSON object");
  for (const char* key : {"states", "actions1", "actions2", "triples"}) {
    if (!doc.contains(key)) throw ParseError(std::string("model document is missing '") + key + "'");
  }

  GameModel m;
  m.states = detail::label_array(doc["states"], "states");
  const std::size_t n = m.states.size();
  m.blocks.resize(n);
  m.weight.assign(n, 1.0);

  std::unordered_map<std::string, std::size_t> state_idx;
  for (std::size_t x = 0; x < n; ++x) state_idx.emplace(m.states[x], x);
  auto lookup_state = [&](const std::string& s, const std::string& where) {
    auto it = state_idx.find(s);
    if (it == state_idx.end()) throw ParseError(where + ": unknown state '" + s + "'");
    return it->second;
  };

  for (const char* key : {"actions1", "actions2"}) {
    const auto& obj = doc[key];
    if (!obj.is_object()) throw ParseError(std::string(key) + " must be an object");
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      const std::size_t x = lookup_state(it.key(), key);
      auto labels = detail::label_array(it.value(), std::string(key) + "[" + it.key() + "]");
      (std::string(key) == "actions1" ? m.blocks[x].actions1 : m.blocks[x].actions2) = std::move(labels);
    }
  }
  if (doc.contains("weight")) {
    const auto& obj = doc["weight"];
    if (!obj.is_object()) throw ParseError("weight must be an object");
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      const std::size_t x = lookup_state(it.key(), "weight");
      if (!it.value().is_number()) throw ParseError("weight[" + it.key() + "] must be a number");
      m.weight[x] = it.value().get<double>();
    }
  }

  std::vector<std::vector<char>> filled(n);
  for (std::size_t x = 0; x < n; ++x) {
    m.blocks[x].triples.assign(m.blocks[x].rows() * m.blocks[x].cols(), TripleData{});
    filled[x].assign(m.blocks[x].triples.size(), 0);
  }

  const auto& triples = doc["triples"];
  if (!triples.is_array()) throw ParseError("triples must be an array");
  std::size_t k = 0;
  for (const auto& tj : triples) {
    const std::string where = "triples[" + std::to_string(k++) + "]";
    if (!tj.is_object()) throw ParseError(where + " must be an object");
    const std::size_t x = lookup_state(detail::string_field(tj, "state", where), where);
    StateBlock& blk = m.blocks[x];
    const std::string a = detail::string_field(tj, "a", where);
    const std::string b = detail::string_field(tj, "b", where);
    auto ia = std::find(blk.actions1.begin(), blk.actions1.end(), a);
    auto ib = std::find(blk.actions2.begin(), blk.actions2.end(), b);
    if (ia == blk.actions1.end()) throw ParseError(where + ": unknown player 1 action '" + a + "'");
    if (ib == blk.actions2.end()) throw ParseError(where + ": unknown player 2 action '" + b + "'");
    const std::size_t i = static_cast<std::size_t>(ia - blk.actions1.begin());
    const std::size_t j = static_cast<std::size_t>(ib - blk.actions2.begin());
    const std::size_t slot = i * blk.cols() + j;
    if (filled[x][slot]) {
      throw ParseError(where + ": duplicate triple (" + m.states[x] + ", " + a + ", " + b + ")");
    }
    filled[x][slot] = 1;

    TripleData t;
    t.alpha = detail::number_field(tj, "alpha", where);
    t.reward = detail::number_field(tj, "reward", where);
    if (!tj.contains("sojourn")) throw ParseError(where + ": missing field 'sojourn'");
    t.sojourn = detail::parse_sojourn(tj["sojourn"], where + ".sojourn");
    t.transition.assign(n, 0.0);
    if (!tj.contains("transition") || !tj["transition"].is_object()) {
      throw ParseError(where + ": transition must be an object");
    }
    for (auto it = tj["transition"].begin(); it != tj["transition"].end(); ++it) {
      const std::size_t y = lookup_state(it.key(), where + ".transition");
      if (!it.value().is_number()) throw ParseError(where + ".transition: probabilities must be numbers");
      t.transition[y] = it.value().get<double>();
    }
    blk.triples[slot] = std::move(t);
  }

  for (std::size_t x = 0; x < n; ++x) {
    const StateBlock& blk = m.blocks[x];
    for (std::size_t s = 0; s < filled[x].size(); ++s) {
      if (!filled[x][s]) {
        throw ParseError("missing triple (" + m.states[x] + ", " + blk.actions1[s / blk.cols()] + ", " +
                         blk.actions2[s % blk.cols()] + ")");
      }
    }
  }
  return m;
}

// Parses and validates a model document.
inline GameModel load_model(const std::string& text) {
  GameModel m = parse_model(text);
  auto violations = validate_model(m);
  if (!violations.empty()) throw ValidationError(std::move(violations));
  return m;
}

// 64-bit FNV-1a of the canonical serialization; used for provenance stamps.
inline std::uint64_t model_hash(const GameModel& m) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : serialize_model(m)) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace smg
