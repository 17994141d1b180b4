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
#include <random>
#include <span>
#include <stdexcept>
#include <thread>
#include <vector>

#include "smg/model.hpp"
#include "smg/shapley.hpp"

namespace smg {

class NotSamplableError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

using SimRng = std::mt19937_64;

// Independent stream for trajectory `index` under `seed`.
inline SimRng trajectory_rng(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return SimRng(seq);
}

// Uniform on [0, 1) with 53 random bits.
template <typename Rng>
double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

template <typename Rng>
double sample_sojourn(const SojournLaw& law, Rng& rng) {
  if (const auto* e = std::get_if<Exponential>(&law)) return -std::log1p(-uniform01(rng)) / e->rate;
  if (const auto* u = std::get_if<Uniform>(&law)) return u->upper * uniform01(rng);
  if (const auto* d = std::get_if<Deterministic>(&law)) return d->duration;
  throw NotSamplableError("direct-weight sojourn laws cannot be sampled");
}

// Draws an index from a probability vector by inverse transform.
template <typename Rng>
std::size_t sample_index(std::span<const double> p, Rng& rng) {
  const double u = uniform01(rng);
  double acc = 0.0;
  std::size_t last = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;
    acc += p[i];
    last = i;
    if (u < acc) return i;
  }
  return last;
}

struct TrajectoryOptions {
  double discount_floor = 1e-8;
  std::size_t max_sojourns = 0;  // 0 = run until the floor
};

struct TrajectoryResult {
  double payoff = 0.0;
  double residual_discount = 1.0;  // D_n when the trajectory stopped
  std::size_t sojourns = 0;
  double tail_bound = 0.0;         // bound on |discarded payoff|
};

inline bool is_samplable(const GameModel& m) {
  for (const auto& blk : m.blocks) {
    for (const auto& t : blk.triples) {
      if (!is_analytic(t.sojourn)) return false;
    }
  }
  return true;
}

// Per-model constants for the truncation tail bound M * omega_max * D / alpha0,
// with M = max |r(x,a,b)| / omega(x).
struct TailConstants {
  double reward_bound = 0.0;
  double weight_max = 1.0;
  double alpha0 = 1.0;

  static TailConstants from(const GameModel& m) {
    TailConstants c;
    c.alpha0 = min_alpha(m);
    c.weight_max = *std::max_element(m.weight.begin(), m.weight.end());
    for (std::size_t x = 0; x < m.num_states(); ++x) {
      for (const auto& t : m.blocks[x].triples) c.reward_bound = std::max(c.reward_bound, std::abs(t.reward) / m.weight[x]);
    }
    return c;
  }

  double bound(double residual_discount) const { return reward_bound * weight_max * residual_discount / alpha0; }
};

// One realization of the continuous-time discounted payoff. Sojourn n adds
// D_n r_n (1 - e^{-alpha_n tau_n}) / alpha_n with D_n = prod_{k<n} e^{-alpha_k tau_k},
// the exact integral of the discounted reward rate over that sojourn.
template <typename Rng>
TrajectoryResult simulate_trajectory(const GameModel& m, const StationaryStrategyPair& pair, std::size_t x0, Rng& rng,
                                     const TrajectoryOptions& opts = {}) {
  if (x0 >= m.num_states()) throw std::out_of_range("unknown initial state");
  TrajectoryResult out;
  std::size_t x = x0;
  double discount = 1.0;
  while (discount >= opts.discount_floor && (opts.max_sojourns == 0 || out.sojourns < opts.max_sojourns)) {
    const StateBlock& blk = m.blocks[x];
    const std::size_t a = sample_index(pair.f[x], rng);
    const std::size_t b = sample_index(pair.g[x], rng);
    const TripleData& t = blk.at(a, b);
    const double tau = sample_sojourn(t.sojourn, rng);
    const double decay = -std::expm1(-t.alpha * tau);
    out.payoff += discount * t.reward * decay / t.alpha;
    discount *= 1.0 - decay;
    x = sample_index(t.transition, rng);
    ++out.sojourns;
  }
  out.residual_discount = discount;
  out.tail_bound = TailConstants::from(m).bound(discount);
  return out;
}

struct MCEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t trajectories = 0;
  double truncation_bound = 0.0;
  std::uint64_t seed = 0;
};

struct SimulationOptions {
  double discount_floor = 1e-8;
  unsigned threads = 0;  // 0 = hardware concurrency
};

namespace detail {

struct Moments {
  double count = 0.0;
  double mean = 0.0;
  double m2 = 0.0;

  void push(double v) {
    count += 1.0;
    const double d = v - mean;
    mean += d / count;
    m2 += d * (v - mean);
  }

  static Moments merge(const Moments& a, const Moments& b) {
    if (a.count == 0.0) return b;
    if (b.count == 0.0) return a;
    Moments r;
    r.count = a.count + b.count;
    const double d = b.mean - a.mean;
    r.mean = a.mean + d * b.count / r.count;
    r.m2 = a.m2 + b.m2 + d * d * a.count * b.count / r.count;
    return r;
  }
};

inline constexpr std::size_t kMomentBlock = 1024;

// Block moments over fixed index ranges, then a pairwise merge tree; the result
// depends only on the values, not on how they were produced.
inline Moments pairwise_moments(std::span<const double> values) {
  std::vector<Moments> level;
  for (std::size_t s = 0; s < values.size(); s += kMomentBlock) {
    Moments blk;
    for (std::size_t i = s; i < std::min(values.size(), s + kMomentBlock); ++i) blk.push(values[i]);
    level.push_back(blk);
  }
  while (level.size() > 1) {
    std::vector<Moments> next;
    for (std::size_t i = 0; i + 1 < level.size(); i += 2) next.push_back(Moments::merge(level[i], level[i + 1]));
    if (level.size() % 2 == 1) next.push_back(level.back());
    level = std::move(next);
  }
  return level.empty() ? Moments{} : level.front();
}

}  // namespace detail

inline MCEstimate estimate_value(const GameModel& m, const StationaryStrategyPair& pair, std::size_t x0,
                                 std::size_t trajectories, std::uint64_t seed, const SimulationOptions& opts = {}) {
  if (trajectories < 2) throw std::invalid_argument("estimate_value needs at least two trajectories");
  if (!is_samplable(m)) throw NotSamplableError("model has direct-weight sojourn laws; Monte Carlo is unavailable");
  check_strategy_pair(m, pair);
  if (x0 >= m.num_states()) throw std::out_of_range("unknown initial state");

  std::vector<double> payoff(trajectories);
  std::vector<double> tail(trajectories);
  const TrajectoryOptions topts{opts.discount_floor, 0};
  auto worker = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      SimRng rng = trajectory_rng(seed, i);
      const TrajectoryResult r = simulate_trajectory(m, pair, x0, rng, topts);
      payoff[i] = r.payoff;
      tail[i] = r.tail_bound;
    }
  };
  unsigned threads = opts.threads ? opts.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, trajectories));
  if (threads <= 1) {
    worker(0, trajectories);
  } else {
    std::vector<std::jthread> pool;
    const std::size_t chunk = (trajectories + threads - 1) / threads;
    for (std::size_t s = 0; s < trajectories; s += chunk) pool.emplace_back(worker, s, std::min(trajectories, s + chunk));
  }

  const detail::Moments mom = detail::pairwise_moments(payoff);
  MCEstimate est;
  est.mean = mom.mean;
  est.std_error = std::sqrt(mom.m2 / (mom.count - 1.0) / mom.count);
  est.trajectories = trajectories;
  est.truncation_bound = *std::max_element(tail.begin(), tail.end());
  est.seed = seed;
  return est;
}

struct Deviation {
  int player = 1;          // 1 overrides f, 2 overrides g
  std::size_t state = 0;
  std::size_t action = 0;  // pure action played at `state`
};

struct DeviationRow {
  Deviation deviation;
  MCEstimate baseline;
  MCEstimate estimate;
  double difference = 0.0;   // estimate.mean - baseline.mean
  double combined_se = 0.0;  // sqrt(se_b^2 + se_d^2)
};

inline StationaryStrategyPair apply_deviation(const StationaryStrategyPair& pair, const Deviation& d) {
  StationaryStrategyPair out = pair;
  auto& dist = (d.player == 1 ? out.f : out.g).at(d.state);
  std::fill(dist.begin(), dist.end(), 0.0);
  dist.at(d.action) = 1.0;
  return out;
}

// Every pure per-state override that actually changes the pair.
inline std::vector<Deviation> pure_deviations(const GameModel& m, const StationaryStrategyPair& pair) {
  std::vector<Deviation> out;
  for (int player : {1, 2}) {
    for (std::size_t x = 0; x < m.num_states(); ++x) {
      const auto& dist = player == 1 ? pair.f[x] : pair.g[x];
      for (std::size_t a = 0; a < dist.size(); ++a) {
        if (dist[a] == 1.0) continue;
        out.push_back({player, x, a});
      }
    }
  }
  return out;
}

// Estimates each deviation from its own state against the baseline pair, using
// the same seed for both so that the comparison shares random numbers.
inline std::vector<DeviationRow> check_equilibrium_deviation(const GameModel& m, const StationaryStrategyPair& pair,
                                                             const std::vector<Deviation>& deviations,
                                                             std::size_t trajectories, std::uint64_t seed,
                                                             const SimulationOptions& opts = {}) {
  std::vector<DeviationRow> rows;
  std::vector<std::optional<MCEstimate>> baselines(m.num_states());
  for (const Deviation& d : deviations) {
    if (d.player != 1 && d.player != 2) throw std::invalid_argument("deviation player must be 1 or 2");
    if (d.state >= m.num_states()) throw std::out_of_range("deviation state out of range");
    auto& base = baselines[d.state];
    if (!base) base = estimate_value(m, pair, d.state, trajectories, seed, opts);
    DeviationRow row;
    row.deviation = d;
    row.baseline = *base;
    row.estimate = estimate_value(m, apply_deviation(pair, d), d.state, trajectories, seed, opts);
    row.difference = row.estimate.mean - row.baseline.mean;
    row.combined_se = std::hypot(row.baseline.std_error, row.estimate.std_error);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace smg
