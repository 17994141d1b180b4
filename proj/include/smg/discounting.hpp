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
#include <stdexcept>
#include <variant>
#include <vector>

#include "smg/model.hpp"

namespace smg {

namespace detail {

// Below this alpha*upper the uniform law switches to its Taylor expansion.
inline constexpr double kUniformSeriesCutoff = 1e-8;

// 1 - lambda for each analytic law, evaluated without subtracting from 1.
inline double one_minus_continuation(const SojournLaw& law, double alpha) {
  struct Visitor {
    double alpha;
    double operator()(const Exponential& l) const { return alpha / (alpha + l.rate); }
    double operator()(const Uniform& l) const {
      const double z = alpha * l.upper;
      if (z < 1e-3) {
        // z/2 - z^2/6 + z^3/24 - z^4/120 + z^5/720
        return z * (0.5 - z * (1.0 / 6 - z * (1.0 / 24 - z * (1.0 / 120 - z / 720))));
      }
      return (z + std::expm1(-z)) / z;
    }
    double operator()(const Deterministic& l) const { return -std::expm1(-alpha * l.duration); }
    double operator()(const DirectWeights& l) const { return 1.0 - l.continuation; }
  };
  return std::visit(Visitor{alpha}, law);
}

}  // namespace detail

// lambda = int_0^inf e^{-alpha t} H(dt): the expected discount over one sojourn.
inline double continuation_weight(const SojournLaw& law, double alpha) {
  struct Visitor {
    double alpha;
    double operator()(const Exponential& l) const { return l.rate / (alpha + l.rate); }
    double operator()(const Uniform& l) const {
      const double z = alpha * l.upper;
      if (z < detail::kUniformSeriesCutoff) return 1.0 - z / 2 + z * z / 6;
      return -std::expm1(-z) / z;
    }
    double operator()(const Deterministic& l) const { return std::exp(-alpha * l.duration); }
    double operator()(const DirectWeights& l) const { return l.continuation; }
  };
  return std::visit(Visitor{alpha}, law);
}

// d = int_0^inf e^{-alpha t} (1 - H(t)) dt = (1 - lambda) / alpha: the expected
// discounted length of one sojourn.
inline double reward_weight(const SojournLaw& law, double alpha) {
  if (const auto* direct = std::get_if<DirectWeights>(&law)) return direct->reward_weight;
  return detail::one_minus_continuation(law, alpha) / alpha;
}

// H(t): probability that the sojourn has ended by time t. DirectWeights has no
// distribution function and is rejected.
inline double sojourn_cdf(const SojournLaw& law, double t) {
  struct Visitor {
    double t;
    double operator()(const Exponential& l) const { return t <= 0 ? 0.0 : -std::expm1(-l.rate * t); }
    double operator()(const Uniform& l) const { return t <= 0 ? 0.0 : std::min(1.0, t / l.upper); }
    double operator()(const Deterministic& l) const { return t >= l.duration ? 1.0 : 0.0; }
    double operator()(const DirectWeights&) const {
      throw std::invalid_argument("direct weights carry no sojourn distribution function");
    }
  };
  return std::visit(Visitor{t}, law);
}

// The affine-map coefficients of one triple: G(u,x,a,b) = reward * d + dot(row, u),
// with row = lambda * p(.|x,a,b).
struct KernelRow {
  double reward_weight = 0.0;
  double continuation = 0.0;
  std::vector<double> row;
};

inline KernelRow discounted_kernel_row(const TripleData& t) {
  KernelRow k;
  k.reward_weight = reward_weight(t.sojourn, t.alpha);
  k.continuation = continuation_weight(t.sojourn, t.alpha);
  k.row.resize(t.transition.size());
  for (std::size_t y = 0; y < t.transition.size(); ++y) k.row[y] = k.continuation * t.transition[y];
  return k;
}

inline KernelRow discounted_kernel_row(const GameModel& m, const TripleRef& ref) {
  if (ref.state >= m.num_states()) throw std::out_of_range("no such state in model");
  const StateBlock& blk = m.blocks[ref.state];
  if (ref.a >= blk.rows() || ref.b >= blk.cols()) throw std::out_of_range("no such triple in model");
  return discounted_kernel_row(blk.at(ref.a, ref.b));
}

// Coefficients for every triple, laid out like GameModel::blocks.
struct DiscountedCoefficients {
  struct Entry {
    double reward_term = 0.0;  // r * d
    double reward_weight = 0.0;
    double continuation = 0.0;
    std::vector<double> row;
  };
  struct Block {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<Entry> entries;  // row-major
    const Entry& at(std::size_t a, std::size_t b) const { return entries[a * cols + b]; }
  };

  std::vector<Block> blocks;
  std::vector<double> weight;

  static DiscountedCoefficients from(const GameModel& m) {
    DiscountedCoefficients c;
    c.weight = m.weight;
    c.blocks.reserve(m.num_states());
    for (const StateBlock& blk : m.blocks) {
      Block b;
      b.rows = blk.rows();
      b.cols = blk.cols();
      b.entries.reserve(blk.triples.size());
      for (const TripleData& t : blk.triples) {
        KernelRow k = discounted_kernel_row(t);
        b.entries.push_back({t.reward * k.reward_weight, k.reward_weight, k.continuation, std::move(k.row)});
      }
      c.blocks.push_back(std::move(b));
    }
    return c;
  }

  std::size_t num_states() const { return blocks.size(); }

  double max_continuation() const {
    double hi = 0.0;
    for (const auto& b : blocks) {
      for (const auto& e : b.entries) hi = std::max(hi, e.continuation);
    }
    return hi;
  }

  double min_continuation() const {
    double lo = 1.0;
    for (const auto& b : blocks) {
      for (const auto& e : b.entries) lo = std::min(lo, e.continuation);
    }
    return lo;
  }

  // Exact contraction modulus of the Shapley operator in the omega-norm:
  // max over triples of sum_y omega(y) lambda p(y) / omega(x).
  double weighted_modulus() const {
    double hi = 0.0;
    for (std::size_t x = 0; x < blocks.size(); ++x) {
      for (const auto& e : blocks[x].entries) {
        double s = 0.0;
        for (std::size_t y = 0; y < e.row.size(); ++y) s += weight[y] * e.row[y];
        hi = std::max(hi, s / weight[x]);
      }
    }
    return hi;
  }
};

}  // namespace smg
