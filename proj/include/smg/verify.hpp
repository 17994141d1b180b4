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
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "smg/discounting.hpp"
#include "smg/model.hpp"

namespace smg {

// Constants of the fixed-delta regularity construction: exponential rates stay
// below k1, uniform supports above k2.
struct PaperParams {
  double k1 = 100.0;
  double k2 = 0.1;
  double alpha0 = 0.25;
  double delta = 0.1;
};

struct CertificateOptions {
  bool paper_params = false;
  PaperParams paper;
};

struct AssumptionCheck {
  std::string name;
  bool pass = false;
  std::string witness;
};

struct AssumptionCertificate {
  double theta = 0.0;
  double delta = 0.0;
  double alpha0 = 0.0;
  double gamma = 0.0;
  double eta = 0.0;
  double eta_min = 0.0;
  double eta_gamma = 0.0;
  double lambda_max = 0.0;
  // Exact omega-norm contraction modulus of T; equals lambda_max when omega == 1.
  double contraction_modulus = 0.0;
  bool paper_params = false;
  std::vector<AssumptionCheck> checks;
  bool passed = false;

  bool operator==(const AssumptionCertificate& o) const {
    auto same = [](const AssumptionCheck& a, const AssumptionCheck& b) {
      return a.name == b.name && a.pass == b.pass && a.witness == b.witness;
    };
    return theta == o.theta && delta == o.delta && alpha0 == o.alpha0 && gamma == o.gamma && eta == o.eta &&
           eta_min == o.eta_min && eta_gamma == o.eta_gamma && lambda_max == o.lambda_max &&
           contraction_modulus == o.contraction_modulus && paper_params == o.paper_params && passed == o.passed &&
           std::equal(checks.begin(), checks.end(), o.checks.begin(), o.checks.end(), same);
  }
};

class CertificateError : public std::runtime_error {
 public:
  explicit CertificateError(AssumptionCertificate cert)
      : std::runtime_error("model does not satisfy the contraction assumptions (eta*gamma >= 1 or lambda > gamma)"),
        cert_(std::move(cert)) {}
  const AssumptionCertificate& certificate() const { return cert_; }

 private:
  AssumptionCertificate cert_;
};

// gamma = 1 - delta + delta e^{-alpha0 theta}.
inline double compute_gamma(double theta, double delta, double alpha0) {
  if (!(theta > 0.0)) throw std::domain_error("compute_gamma: theta must be positive");
  if (!(delta > 0.0 && delta <= 1.0)) throw std::domain_error("compute_gamma: delta must lie in (0, 1]");
  if (!(alpha0 > 0.0)) throw std::domain_error("compute_gamma: alpha0 must be positive");
  return 1.0 + delta * std::expm1(-alpha0 * theta);
}

// max over analytic triples of H(theta|x,a,b); DirectWeights triples are skipped.
inline double max_sojourn_cdf(const GameModel& m, double theta) {
  double hi = 0.0;
  for (const auto& blk : m.blocks) {
    for (const auto& t : blk.triples) {
      if (is_analytic(t.sojourn)) hi = std::max(hi, sojourn_cdf(t.sojourn, theta));
    }
  }
  return hi;
}

inline bool has_analytic_laws(const GameModel& m) {
  for (const auto& blk : m.blocks) {
    for (const auto& t : blk.triples) {
      if (is_analytic(t.sojourn)) return true;
    }
  }
  return false;
}

struct RegularityParams {
  double theta = 0.0;
  double delta = 0.0;
};

class RegularityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Chooses theta to minimize gamma(theta) = 1 - delta(theta)(1 - e^{-alpha0 theta}),
// delta(theta) = 1 - max H(theta|x,a,b): a log-spaced scan of (0, theta_hi]
// followed by golden-section refinement around the best grid point.
inline RegularityParams find_regularity_params(const GameModel& m) {
  const double alpha0 = min_alpha(m);
  double theta_hi = std::numeric_limits<double>::infinity();
  double min_rate = std::numeric_limits<double>::infinity();
  bool any = false;
  for (const auto& blk : m.blocks) {
    for (const auto& t : blk.triples) {
      if (const auto* u = std::get_if<Uniform>(&t.sojourn)) {
        theta_hi = std::min(theta_hi, u->upper);
        any = true;
      } else if (const auto* d = std::get_if<Deterministic>(&t.sojourn)) {
        theta_hi = std::min(theta_hi, d->duration);
        any = true;
      } else if (const auto* e = std::get_if<Exponential>(&t.sojourn)) {
        min_rate = std::min(min_rate, e->rate);
        any = true;
      }
    }
  }
  if (!any) throw RegularityError("no analytic sojourn laws to derive regularity constants from");
  if (!std::isfinite(theta_hi)) theta_hi = 10.0 / min_rate;

  auto gamma_at = [&](double theta) {
    const double delta = 1.0 - max_sojourn_cdf(m, theta);
    return 1.0 + delta * std::expm1(-alpha0 * theta);
  };

  constexpr int kGrid = 241;
  constexpr double kDecades = 12.0;
  std::vector<double> grid(kGrid);
  for (int k = 0; k < kGrid; ++k) grid[k] = theta_hi * std::pow(10.0, -kDecades * (kGrid - 1 - k) / (kGrid - 1));
  int best = 0;
  double best_gamma = gamma_at(grid[0]);
  for (int k = 1; k < kGrid; ++k) {
    const double g = gamma_at(grid[k]);
    if (g < best_gamma) {
      best_gamma = g;
      best = k;
    }
  }

  double lo = grid[std::max(best - 1, 0)];
  double hi = grid[std::min(best + 1, kGrid - 1)];
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - inv_phi * (hi - lo);
  double d = lo + inv_phi * (hi - lo);
  double gc = gamma_at(c);
  double gd = gamma_at(d);
  for (int it = 0; it < 200 && (hi - lo) > 1e-14 * hi; ++it) {
    if (gc < gd) {
      hi = d;
      d = c;
      gd = gc;
      c = hi - inv_phi * (hi - lo);
      gc = gamma_at(c);
    } else {
      lo = c;
      c = d;
      gc = gd;
      d = lo + inv_phi * (hi - lo);
      gd = gamma_at(d);
    }
  }
  double theta = grid[best];
  for (double cand : {c, d}) {
    if (gamma_at(cand) < gamma_at(theta)) theta = cand;
  }
  const double delta = 1.0 - max_sojourn_cdf(m, theta);
  if (!(delta > 0.0)) throw RegularityError("no theta with a positive delta exists");
  return {theta, delta};
}

// theta = min((1 - delta) k2, ln(1/delta) / k1) with delta fixed; for delta = 0.1
// this is min(0.9 k2, ln 10 / k1).
inline RegularityParams paper_regularity_params(const PaperParams& p) {
  const double theta = std::min((1.0 - p.delta) * p.k2, std::log(1.0 / p.delta) / p.k1);
  return {theta, p.delta};
}

struct DriftCheck {
  double eta_min = 0.0;
  double eta = 0.0;
  double eta_gamma = 0.0;
  bool pass = false;
};

// eta_min = max over triples of sum_y omega(y) p(y|x,a,b) / omega(x). With
// omega == 1 the reported eta is lifted to (1 + gamma)/(2 gamma) so that
// eta*gamma < 1 holds strictly.
inline DriftCheck check_drift(const GameModel& m, double gamma) {
  DriftCheck out;
  for (std::size_t x = 0; x < m.num_states(); ++x) {
    for (const auto& t : m.blocks[x].triples) {
      double s = 0.0;
      for (std::size_t y = 0; y < t.transition.size(); ++y) s += m.weight[y] * t.transition[y];
      out.eta_min = std::max(out.eta_min, s / m.weight[x]);
    }
  }
  out.eta = out.eta_min;
  if (m.unit_weight()) out.eta = std::max(out.eta_min, (1.0 + gamma) / (2.0 * gamma));
  out.eta_gamma = out.eta * gamma;
  out.pass = out.eta_gamma < 1.0;
  return out;
}

namespace detail {

inline std::string fmt(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

}  // namespace detail

inline AssumptionCertificate check_assumptions(const GameModel& m, const CertificateOptions& opts = {}) {
  AssumptionCertificate cert;
  cert.paper_params = opts.paper_params;
  const DiscountedCoefficients coeffs = DiscountedCoefficients::from(m);
  cert.lambda_max = coeffs.max_continuation();
  cert.contraction_modulus = coeffs.weighted_modulus();
  const double model_alpha0 = min_alpha(m);

  // Regularity: H(theta|x,a,b) <= 1 - delta everywhere.
  bool regular = false;
  std::string regular_witness;
  if (!has_analytic_laws(m)) {
    cert.alpha0 = opts.paper_params ? opts.paper.alpha0 : model_alpha0;
    cert.gamma = cert.lambda_max;
    regular = cert.lambda_max < 1.0;
    regular_witness = "no analytic sojourn laws; certified through lambda_max = " + detail::fmt(cert.lambda_max);
  } else {
    RegularityParams rp;
    if (opts.paper_params) {
      rp = paper_regularity_params(opts.paper);
      cert.alpha0 = opts.paper.alpha0;
    } else {
      rp = find_regularity_params(m);
      cert.alpha0 = model_alpha0;
    }
    cert.theta = rp.theta;
    cert.delta = rp.delta;
    const double max_h = max_sojourn_cdf(m, rp.theta);
    regular = rp.theta > 0.0 && rp.delta > 0.0 && rp.delta <= 1.0 - max_h;
    regular_witness = "theta = " + detail::fmt(rp.theta) + ", delta = " + detail::fmt(rp.delta) +
                 ", max H(theta) = " + detail::fmt(max_h);
    cert.gamma = compute_gamma(rp.theta, rp.delta, cert.alpha0);
  }
  cert.checks.push_back({"regularity", regular, regular_witness});

  // Discount rates bounded below by alpha0 > 0; omega >= 1.
  bool weights_ok = true;
  for (double w : m.weight) weights_ok = weights_ok && w >= 1.0;
  const bool discount_ok = cert.alpha0 > 0.0 && cert.alpha0 <= model_alpha0 && weights_ok;
  cert.checks.push_back({"discount_and_weight", discount_ok,
                         "alpha0 = " + detail::fmt(cert.alpha0) + ", min alpha = " + detail::fmt(model_alpha0)});

  // Drift condition with 0 < eta*gamma < 1.
  const DriftCheck drift = check_drift(m, cert.gamma);
  cert.eta_min = drift.eta_min;
  cert.eta = drift.eta;
  cert.eta_gamma = drift.eta_gamma;
  cert.checks.push_back({"drift", drift.pass,
                         "eta_min = " + detail::fmt(drift.eta_min) + ", eta = " + detail::fmt(drift.eta) +
                             ", eta*gamma = " + detail::fmt(drift.eta_gamma)});

  // Compactness and continuity hold for any finite model.
  cert.checks.push_back({"compactness", true, "finite state and action sets"});

  // Every continuation factor must lie below gamma.
  const bool bounded = cert.lambda_max <= cert.gamma + 1e-15;
  cert.checks.push_back({"lambda_bounded_by_gamma", bounded,
                         "lambda_max = " + detail::fmt(cert.lambda_max) + ", gamma = " + detail::fmt(cert.gamma)});

  cert.passed = true;
  for (const auto& c : cert.checks) cert.passed = cert.passed && c.pass;
  return cert;
}

}  // namespace smg
