// Copyright 2026 The Spacetime Readout Authors
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

#include "readout/decay_model.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "readout/quadrature.h"

namespace readout {

void DecayModelParams::validate() const {
  if (!std::isfinite(t)) {
    throw std::domain_error("duration must be finite");
  }
  if (t < 0) {
    throw std::domain_error("duration must be non-negative");
  }
  rates.validate();
}

namespace {

// lambda e^{-lambda s} L_{Lambda(s)}(k) for all k in [lo, hi), where
// Lambda(s) = mu1 s + mu0 (t - s) is the Poisson mean of a qubit that decays at s.
class DecayIntegrand {
 public:
  DecayIntegrand(const RateParams &rates, double t, std::size_t lo, std::size_t hi)
      : rates_(rates), t_(t), lo_(lo), log_norm_(hi - lo) {
    for (std::size_t k = lo; k < hi; ++k) {
      const double x = static_cast<double>(k);
      log_norm_[k - lo] =
          k == 0 ? 0.0
                 : -detail::stirling_error(x) - 0.5 * std::log(2 * std::numbers::pi * x);
    }
  }

  std::size_t size() const { return log_norm_.size(); }

  double poisson_mean(double s) const { return rates_.mu1 * s + rates_.mu0 * (t_ - s); }

  // out[k] += weight * integrand_k(s)
  void accumulate(double s, double weight, std::vector<double> &out) const {
    const double mean = poisson_mean(s);
    const double log_prefactor = std::log(rates_.lambda * weight) - rates_.lambda * s;
    // Beyond ~40 standard deviations the pmf underflows anyway.
    const double reach = 40.0 * std::sqrt(mean) + 40.0;
    const double lo_d = std::max(static_cast<double>(lo_), std::floor(mean - reach));
    const double hi_d = std::min(static_cast<double>(lo_ + size()), std::ceil(mean + reach) + 1);
    if (hi_d <= lo_d) return;
    const auto first = static_cast<std::size_t>(lo_d);
    const auto last = static_cast<std::size_t>(hi_d);
    for (std::size_t k = first; k < last; ++k) {
      double log_pmf;
      if (k == 0) {
        log_pmf = -mean;
      } else {
        log_pmf = log_norm_[k - lo_] - detail::poisson_deviance(static_cast<double>(k), mean);
      }
      out[k - lo_] += std::exp(log_prefactor + log_pmf);
    }
  }

 private:
  RateParams rates_;
  double t_;
  std::size_t lo_;
  std::vector<double> log_norm_;
};

class PanelIntegrator {
 public:
  PanelIntegrator(const DecayIntegrand &integrand, const DecayQuadratureOptions &options, double t)
      : integrand_(integrand), rule_(gauss_legendre(options.order)), options_(options), t_(t) {}

  std::vector<double> panel(double x0, double x1) const {
    std::vector<double> out(integrand_.size(), 0.0);
    const double half = 0.5 * (x1 - x0);
    const double mid = 0.5 * (x1 + x0);
    for (std::size_t i = 0; i < rule_.nodes.size(); ++i) {
      integrand_.accumulate(mid + half * rule_.nodes[i], half * rule_.weights[i], out);
    }
    return out;
  }

  // Splits [x0, x1] until the two-half estimate agrees with `coarse` for
  // every count, then adds the two-half estimate to `out`.
  void refine(double x0, double x1, const std::vector<double> &coarse,
              const std::vector<double> &reference, int depth, std::vector<double> &out) const {
    const double mid = 0.5 * (x0 + x1);
    std::vector<double> left = panel(x0, mid);
    std::vector<double> right = panel(mid, x1);
    const double share = (x1 - x0) / t_;
    bool converged = true;
    if (depth < options_.max_depth) {
      for (std::size_t k = 0; k < out.size(); ++k) {
        const double fine = left[k] + right[k];
        const double tol = share * (options_.rel_tol * reference[k] + kAbsoluteFloor);
        if (std::abs(fine - coarse[k]) > tol) {
          converged = false;
          break;
        }
      }
    }
    if (converged) {
      for (std::size_t k = 0; k < out.size(); ++k) {
        out[k] += left[k] + right[k];
      }
      return;
    }
    refine(x0, mid, left, reference, depth + 1, out);
    refine(mid, x1, right, reference, depth + 1, out);
  }

 private:
  // Counts whose integral is below this are far outside the retained support.
  static constexpr double kAbsoluteFloor = 1e-25;

  const DecayIntegrand &integrand_;
  const GaussLegendreRule &rule_;
  const DecayQuadratureOptions &options_;
  double t_;
};

// Initial panel edges over the decay time: each panel spans about two
// standard deviations of the local Poisson mean and at most one decay length.
std::vector<double> initial_panels(const RateParams &rates, double t, double scale) {
  const double spread = rates.mu1 - rates.mu0;
  std::vector<double> edges{0.0};
  double s = 0.0;
  while (s < t) {
    double step = t - s;
    if (spread > 0) {
      const double mean = rates.mu1 * s + rates.mu0 * (t - s);
      step = std::min(step, 2.0 * std::max(1.0, std::sqrt(mean)) / spread * scale);
    }
    if (rates.lambda > 0) {
      step = std::min(step, scale / rates.lambda);
    }
    s = (t - s - step < 1e-12 * t) ? t : s + step;
    edges.push_back(s);
  }
  return edges;
}

}  // namespace

DiscreteDist decaying_poisson(const DecayModelParams &params,
                              const DecayQuadratureOptions &options) {
  params.validate();
  if (!(options.panel_scale > 0) || options.order < 2 || !(options.rel_tol > 0)) {
    throw std::invalid_argument("invalid quadrature options");
  }
  const RateParams &rates = params.rates;
  const double t = params.t;
  if (t == 0) {
    return DiscreteDist::point_mass(0);
  }

  const std::size_t lo = detail::poisson_support_bounds(rates.mu0 * t).first;
  const std::size_t hi = detail::poisson_support_bounds(rates.mu1 * t).second;
  std::vector<double> masses(hi - lo, 0.0);

  // No decay before t: the qubit stays bright for the whole window.
  const double survive_log = -rates.lambda * t;
  for (std::size_t k = lo; k < hi; ++k) {
    masses[k - lo] = std::exp(survive_log + log_poisson_pmf(k, rates.mu1 * t));
  }

  if (rates.lambda > 0) {
    const DecayIntegrand integrand(rates, t, lo, hi);
    const PanelIntegrator integrator(integrand, options, t);
    const std::vector<double> edges = initial_panels(rates, t, options.panel_scale);

    std::vector<std::vector<double>> coarse;
    coarse.reserve(edges.size() - 1);
    std::vector<double> reference(masses.size(), 0.0);
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
      coarse.push_back(integrator.panel(edges[i], edges[i + 1]));
      for (std::size_t k = 0; k < reference.size(); ++k) {
        reference[k] += coarse.back()[k];
      }
    }
    std::vector<double> integral(masses.size(), 0.0);
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
      integrator.refine(edges[i], edges[i + 1], coarse[i], reference, 0, integral);
    }
    for (std::size_t k = 0; k < masses.size(); ++k) {
      masses[k] += integral[k];
    }
  }
  return trimmed(lo, std::move(masses), 0.0);
}

Moments decaying_poisson_moments(const DecayModelParams &params) {
  params.validate();
  const RateParams &rates = params.rates;
  const double t = params.t;
  const double bright = rates.mu1 * t;
  const double survive = std::exp(-rates.lambda * t);
  double first = survive * bright;
  double second = survive * bright * bright;

  if (rates.lambda > 0 && t > 0) {
    const GaussLegendreRule &rule = gauss_legendre(20);
    const int panels = std::max(1, static_cast<int>(std::ceil(rates.lambda * t)));
    const double width = t / panels;
    for (int p = 0; p < panels; ++p) {
      const double mid = (p + 0.5) * width;
      for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double s = mid + 0.5 * width * rule.nodes[i];
        const double density = rates.lambda * std::exp(-rates.lambda * s);
        const double mean = rates.mu1 * s + rates.mu0 * (t - s);
        const double w = 0.5 * width * rule.weights[i] * density;
        first += w * mean;
        second += w * mean * mean;
      }
    }
  }
  const double spread = std::max(0.0, second - first * first);
  return Moments{first, first + spread};
}

}  // namespace readout
