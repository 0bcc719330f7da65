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

#include <gtest/gtest.h>

#include <boost/math/distributions/poisson.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "readout/mc_oracle.h"

using namespace readout;

namespace {

const RateParams kDefaultRates{3.5, 14.0, 0.0041};

// With s the decay time the integrand's Poisson mean is linear in s, so the
// integral collapses to a difference of regularized incomplete gammas:
//   lambda/(mu1-mu0) e^{b mu0 t} (1+b)^{-(k+1)}
//     [P(k+1, (1+b) mu1 t) - P(k+1, (1+b) mu0 t)],   b = lambda/(mu1-mu0).
double w_closed_form(const RateParams &r, double t, unsigned k) {
  const double survive =
      std::exp(-r.lambda * t) * boost::math::pdf(boost::math::poisson_distribution<double>(r.mu1 * t), k);
  if (r.lambda == 0) return survive;
  const double d = r.mu1 - r.mu0;
  const double b = r.lambda / d;
  const double x0 = (1 + b) * r.mu0 * t;
  const double x1 = (1 + b) * r.mu1 * t;
  // Difference of the upper functions when both lower ones sit near 1.
  const double diff = x0 > k + 1.0
                          ? boost::math::gamma_q(k + 1.0, x0) - boost::math::gamma_q(k + 1.0, x1)
                          : boost::math::gamma_p(k + 1.0, x1) - boost::math::gamma_p(k + 1.0, x0);
  const double scale =
      r.lambda / d * std::exp(b * r.mu0 * t - (k + 1.0) * std::log1p(b));
  return survive + scale * diff;
}

}  // namespace

TEST(DecayingPoisson, no_decay_is_bright_poisson) {
  for (double t : {0.1, 1.0, 3.0, 20.0}) {
    const DiscreteDist w = decaying_poisson({{3.5, 14.0, 0.0}, t});
    const DiscreteDist l = poisson_pmf(14.0 * t);
    for (std::size_t k = 0; k < std::max(w.end(), l.end()); ++k) {
      EXPECT_NEAR(w(k), l(k), 1e-12) << t << " " << k;
    }
  }
}

TEST(DecayingPoisson, equal_rates_hide_the_decay) {
  for (double lambda : {0.0041, 0.5, 20.0}) {
    const DiscreteDist w = decaying_poisson({{7.0, 7.0, lambda}, 2.0});
    const DiscreteDist l = poisson_pmf(14.0);
    for (std::size_t k = 0; k < std::max(w.end(), l.end()); ++k) {
      EXPECT_NEAR(w(k), l(k), 1e-10) << lambda << " " << k;
    }
  }
}

TEST(DecayingPoisson, zero_duration_is_point_mass) {
  const DiscreteDist w = decaying_poisson({kDefaultRates, 0.0});
  EXPECT_EQ(w(0), 1.0);
  EXPECT_EQ(w.size(), 1u);
}

TEST(DecayingPoisson, frozen_paper_values_at_three_ms) {
  const DiscreteDist w = decaying_poisson({kDefaultRates, 3.0});
  // 40-digit quadrature reference values.
  const std::pair<unsigned, double> frozen[] = {
      {0, 1.074813095266862894e-08}, {5, 1.966005480791360231e-05},
      {10, 2.031011590636145834e-04}, {20, 4.558418672133186923e-04},
      {30, 1.104330065401169434e-02}, {42, 6.086246926738383608e-02},
      {60, 1.695957576029675254e-03}, {80, 5.750207709608023093e-08},
  };
  for (const auto &[k, want] : frozen) {
    EXPECT_NEAR(w(k) / want, 1.0, 1e-10) << k;
  }
}

TEST(DecayingPoisson, matches_incomplete_gamma_oracle) {
  const RateParams cases[] = {kDefaultRates, {1.0, 30.0, 0.2}, {0.0, 10.0, 1.0}, {3.5, 14.0, 5.0}};
  for (const RateParams &r : cases) {
    for (double t : {0.05, 1.0, 3.0, 25.0}) {
      const DiscreteDist w = decaying_poisson({r, t});
      for (std::size_t k = w.offset(); k < w.end(); ++k) {
        const double want = w_closed_form(r, t, static_cast<unsigned>(k));
        EXPECT_NEAR(w(k), want, 1e-10 * want + 1e-15) << r.lambda << " " << t << " " << k;
      }
      EXPECT_LE(w.truncation_loss(), 1e-10);
      EXPECT_NEAR(w.total_mass() + w.truncation_loss(), 1.0, 1e-9);
    }
  }
}

TEST(DecayingPoisson, halving_panels_is_stable) {
  for (double t : {0.5, 3.0, 50.0}) {
    const DiscreteDist coarse = decaying_poisson({kDefaultRates, t});
    DecayQuadratureOptions fine;
    fine.panel_scale = 0.5;
    const DiscreteDist refined = decaying_poisson({kDefaultRates, t}, fine);
    for (std::size_t k = 0; k < std::max(coarse.end(), refined.end()); ++k) {
      EXPECT_NEAR(coarse(k), refined(k), 1e-10) << t << " " << k;
    }
  }
}

TEST(DecayingPoisson, rejects_bad_params) {
  EXPECT_THROW(decaying_poisson({kDefaultRates, -1.0}), std::domain_error);
  EXPECT_THROW(decaying_poisson({kDefaultRates, std::numeric_limits<double>::infinity()}),
               std::domain_error);
  EXPECT_THROW(decaying_poisson({{3.5, 14.0, std::numeric_limits<double>::quiet_NaN()}, 1.0}),
               std::domain_error);
  EXPECT_THROW(decaying_poisson({{14.0, 3.5, 0.1}, 1.0}), std::domain_error);
}

TEST(DecayingPoisson, mean_strictly_between_pure_cases) {
  for (double t : {0.1, 3.0, 100.0}) {
    const Moments m = moments(decaying_poisson({kDefaultRates, t}));
    EXPECT_GT(m.mean, 3.5 * t);
    EXPECT_LT(m.mean, 14.0 * t);
  }
}

TEST(DecayingPoisson, mean_non_increasing_in_lambda) {
  double prev = std::numeric_limits<double>::infinity();
  for (double lambda : {0.0, 0.001, 0.0041, 0.01, 0.1, 1.0, 10.0}) {
    const double mean = moments(decaying_poisson({{3.5, 14.0, lambda}, 3.0})).mean;
    EXPECT_LE(mean, prev + 1e-12);
    prev = mean;
  }
}

TEST(DecayingPoisson, monte_carlo_per_bin) {
  const std::uint64_t shots = 10'000'000;
  const DiscreteDist w = decaying_poisson({kDefaultRates, 3.0});
  const Histogram h = sample_photon_counts(kDefaultRates, 1, 3.0, shots, 424242);
  int checked = 0;
  for (std::size_t k = 0; k < h.counts.size(); ++k) {
    const double p = w(k);
    // Bins with fewer than ~10 expected hits are too coarse for a 3 SE check.
    if (p * shots < 10) continue;
    const double freq = static_cast<double>(h.counts[k]) / shots;
    const double se = std::sqrt(p * (1 - p) / shots);
    EXPECT_LE(std::abs(freq - p), 3 * se) << k;
    ++checked;
  }
  EXPECT_GT(checked, 40);
}

TEST(DecayingPoissonMoments, closed_form) {
  // E[min(tau, t)] and E[min(tau, t)^2] for tau ~ Exp(lambda).
  for (double t : {0.5, 1.0, 3.0, 40.0}) {
    const double l = kDefaultRates.lambda;
    const double a = kDefaultRates.mu1 - kDefaultRates.mu0;
    const double e1 = -std::expm1(-l * t) / l;
    const double e2 = 2 / (l * l) * (1 - std::exp(-l * t) * (1 + l * t));
    const double mean = kDefaultRates.mu0 * t + a * e1;
    const double var = mean + a * a * (e2 - e1 * e1);
    const Moments m = decaying_poisson_moments({kDefaultRates, t});
    EXPECT_NEAR(m.mean / mean, 1.0, 1e-10) << t;
    EXPECT_NEAR(m.variance / var, 1.0, 1e-8) << t;
  }
  const Moments frozen = decaying_poisson_moments({kDefaultRates, 3.0});
  EXPECT_NEAR(frozen.mean, 41.807066836108041, 1e-9);
  EXPECT_NEAR(frozen.variance, 45.825589549615495, 1e-8);
}

TEST(DecayingPoissonMoments, limits) {
  const Moments none = decaying_poisson_moments({{3.5, 14.0, 0.0}, 2.0});
  EXPECT_DOUBLE_EQ(none.mean, 28.0);
  EXPECT_DOUBLE_EQ(none.variance, 28.0);
  const Moments fast = decaying_poisson_moments({{3.5, 14.0, 1e6}, 1.0});
  EXPECT_NEAR(fast.mean / 3.5, 1.0, 1e-3);
}

TEST(DecayingPoissonMoments, agree_with_summed_pmf) {
  for (double t : {0.1, 1.0, 3.0, 10.0, 100.0}) {
    const Moments direct = moments(decaying_poisson({kDefaultRates, t}));
    const Moments quad = decaying_poisson_moments({kDefaultRates, t});
    EXPECT_NEAR(direct.mean / quad.mean, 1.0, 1e-8) << t;
    EXPECT_NEAR(direct.variance / quad.variance, 1.0, 1e-8) << t;
  }
}
