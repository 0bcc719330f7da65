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

#include "readout/scheme_stats.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>

#include "readout/decay_model.h"

namespace readout {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Mixture weights below this are dropped from composite sums.
constexpr double kSkipWeight = 1e-15;

void check_duration(double t) {
  if (!std::isfinite(t) || t < 0) {
    throw std::domain_error("duration must be finite and non-negative");
  }
}

// sum_q T(q) same^{*q} * other^{*(n-q)}
DiscreteDist mix_over_outcomes(const OutcomeDist &outcomes, const DiscreteDist &same,
                               const DiscreteDist &other) {
  const int n = outcomes.n_qubits;
  std::vector<double> weights;
  std::vector<DiscreteDist> parts;
  for (int q = 0; q <= n; ++q) {
    const double w = outcomes.probs[q];
    weights.push_back(w);
    // Skipped slots keep their weight so mixture() books it as loss.
    parts.push_back(w < kSkipWeight ? DiscreteDist()
                                    : convolve(n_fold_convolve(same, q),
                                               n_fold_convolve(other, n - q)));
  }
  return mixture(weights, parts, kSkipWeight);
}

// Far-tail error probabilities are summed term by term: the trimmed pmf
// drops exactly the mass these need.
double poisson_upper_tail(double omega, std::size_t from) {
  double sum = 0;
  for (std::size_t k = from;; ++k) {
    const double term = std::exp(log_poisson_pmf(k, omega));
    sum += term;
    if (static_cast<double>(k) > omega && term <= 1e-18 * sum) break;
    if (term == 0 && static_cast<double>(k) > omega) break;
  }
  return sum;
}

double poisson_lower_tail(double omega, std::size_t upto) {
  double sum = 0;
  for (std::size_t k = upto + 1; k-- > 0;) {
    const double term = std::exp(log_poisson_pmf(k, omega));
    sum += term;
    if (static_cast<double>(k) < omega && (term <= 1e-18 * sum || term == 0)) break;
  }
  return sum;
}

}  // namespace

std::string_view to_string(ReadoutModel m) {
  switch (m) {
    case ReadoutModel::kIdealPoisson:
      return "ideal";
    case ReadoutModel::kNoisyDecaying:
      return "noisy";
    case ReadoutModel::kGeneralInjected:
      return "injected";
  }
  return "unknown";
}

LawProvider tabulated_laws(std::vector<std::pair<double, SingleQubitLaws>> table) {
  auto lookup = std::make_shared<std::map<double, SingleQubitLaws>>();
  for (auto &[t, laws] : table) {
    lookup->insert_or_assign(t, std::move(laws));
  }
  return [lookup](double t) -> SingleQubitLaws {
    auto it = lookup->find(t);
    if (it == lookup->end()) {
      throw std::out_of_range("no single-qubit laws tabulated for t = " + std::to_string(t));
    }
    return it->second;
  };
}

void SchemeConfig::validate() const {
  if (n_qubits < 1 || n_qubits > kMaxQubits) {
    throw std::domain_error("qubit count must lie in [1, " + std::to_string(kMaxQubits) + "]");
  }
  rates.validate();
  noise.validate();
  if (model == ReadoutModel::kGeneralInjected) {
    if (!injected) {
      throw std::invalid_argument("injected model needs gate statistics and laws");
    }
    general_t_pair(n_qubits, injected->t0, injected->t1);
    if (!injected->laws) {
      throw std::invalid_argument("injected model needs a single-qubit law provider");
    }
  }
}

std::pair<OutcomeDist, OutcomeDist> gate_statistics(const SchemeConfig &config) {
  const int n = config.n_qubits;
  switch (config.model) {
    case ReadoutModel::kIdealPoisson:
      return {noiseless_outcome(n), noiseless_outcome(n)};
    case ReadoutModel::kNoisyDecaying:
      // Dark inputs are untouched by the gates: all n qubits stay in |0>.
      return {noiseless_outcome(n), outcome_dist(n, config.noise)};
    case ReadoutModel::kGeneralInjected:
      return {config.injected->t0, config.injected->t1};
  }
  throw std::logic_error("unhandled readout model");
}

CompositeStats compose(const SchemeConfig &config, double t) {
  config.validate();
  check_duration(t);
  const int n = config.n_qubits;
  const RateParams &r = config.rates;

  CompositeStats out{DiscreteDist(), DiscreteDist(), {}, {}, t};
  switch (config.model) {
    case ReadoutModel::kIdealPoisson:
      out.p0 = poisson_pmf(n * r.mu0 * t);
      out.p1 = poisson_pmf(n * r.mu1 * t);
      break;
    case ReadoutModel::kNoisyDecaying: {
      out.p0 = poisson_pmf(n * r.mu0 * t);
      const DiscreteDist bright = decaying_poisson({r, t});
      const OutcomeDist gates = outcome_dist(n, config.noise);
      std::vector<double> weights;
      std::vector<DiscreteDist> parts;
      for (int q = 0; q <= n; ++q) {
        weights.push_back(gates.probs[q]);
        parts.push_back(gates.probs[q] < kSkipWeight
                            ? DiscreteDist()
                            : convolve(n_fold_convolve(bright, q),
                                       poisson_pmf((n - q) * r.mu0 * t)));
      }
      out.p1 = mixture(weights, parts, kSkipWeight);
      break;
    }
    case ReadoutModel::kGeneralInjected: {
      const SingleQubitLaws laws = config.injected->laws(t);
      out.p0 = mix_over_outcomes(config.injected->t0, laws.dark, laws.bright);
      out.p1 = mix_over_outcomes(config.injected->t1, laws.bright, laws.dark);
      break;
    }
  }
  out.m0 = moments(out.p0);
  out.m1 = moments(out.p1);
  return out;
}

double snr(const Moments &m0, const Moments &m1) {
  const double gap = std::abs(m0.mean - m1.mean);
  if (gap == 0) {
    return 0.0;
  }
  const double spread = std::sqrt(m0.variance) + std::sqrt(m1.variance);
  if (spread == 0) {
    return kInf;
  }
  return 2 * gap / spread;
}

double snr_direct(const CompositeStats &stats) { return snr(stats.m0, stats.m1); }

double snr_general(const OutcomeDist &t0, const OutcomeDist &t1, const Moments &dark,
                   const Moments &bright, int n) {
  if (t0.n_qubits != n || t1.n_qubits != n) {
    throw std::invalid_argument("gate statistics do not match the qubit count");
  }
  const double nq = n;
  const double q0 = t0.mean();
  const double q1 = t1.mean();
  const double gap = bright.mean - dark.mean;
  const double var0 = q0 * dark.variance + (nq - q0) * bright.variance + gap * gap * t0.variance();
  const double var1 = q1 * bright.variance + (nq - q1) * dark.variance + gap * gap * t1.variance();
  const double signal = 2 * std::abs(gap) * std::abs(q0 + q1 - nq);
  if (signal == 0) {
    return 0.0;
  }
  const double spread = std::sqrt(std::max(0.0, var0)) + std::sqrt(std::max(0.0, var1));
  if (spread == 0) {
    return kInf;
  }
  return signal / spread;
}

std::pair<Moments, Moments> single_qubit_moments(const SchemeConfig &config, double t) {
  check_duration(t);
  const RateParams &r = config.rates;
  switch (config.model) {
    case ReadoutModel::kIdealPoisson:
      return {Moments{r.mu0 * t, r.mu0 * t}, Moments{r.mu1 * t, r.mu1 * t}};
    case ReadoutModel::kNoisyDecaying:
      return {Moments{r.mu0 * t, r.mu0 * t}, decaying_poisson_moments({r, t})};
    case ReadoutModel::kGeneralInjected: {
      const SingleQubitLaws laws = config.injected->laws(t);
      return {moments(laws.dark), moments(laws.bright)};
    }
  }
  throw std::logic_error("unhandled readout model");
}

double snr_at(const SchemeConfig &config, double t) {
  if (t == 0) {
    return 0.0;
  }
  const auto [t0, t1] = gate_statistics(config);
  const auto [dark, bright] = single_qubit_moments(config, t);
  return snr_general(t0, t1, dark, bright, config.n_qubits);
}

double mi_at_threshold(const CompositeStats &stats, double eta) {
  return 0.5 * (tail_ge(stats.p0, eta) + head_lt(stats.p1, eta));
}

MiResult mi_optimal(const CompositeStats &stats) {
  const std::size_t lo = std::min(stats.p0.offset(), stats.p1.offset());
  const std::size_t hi = std::max(stats.p0.end(), stats.p1.end());
  const std::size_t span = hi - lo + 1;  // thresholds lo..hi inclusive

  // false_bright[i]: P_0(k >= lo + i), summed from the top for accuracy.
  std::vector<double> false_bright(span, 0.0);
  for (std::size_t i = span - 1; i-- > 0;) {
    false_bright[i] = false_bright[i + 1] + stats.p0.pmf(lo + i);
  }
  // false_dark[i]: P_1(k < lo + i)
  std::vector<double> false_dark(span, 0.0);
  for (std::size_t i = 1; i < span; ++i) {
    false_dark[i] = false_dark[i - 1] + stats.p1.pmf(lo + i - 1);
  }

  MiResult best{0.5 * (false_bright[0] + false_dark[0]), static_cast<double>(lo)};
  for (std::size_t i = 1; i < span; ++i) {
    const double mi = 0.5 * (false_bright[i] + false_dark[i]);
    // Differences at rounding level count as ties.
    if (mi < best.mi - 1e-15) {
      best = MiResult{mi, static_cast<double>(lo + i)};
    }
  }
  return best;
}

MeritPoint merit_point(const SchemeConfig &config, double t) {
  const CompositeStats stats = compose(config, t);
  const MiResult mi = mi_optimal(stats);
  return MeritPoint{config.n_qubits, t, snr_direct(stats), mi.mi, mi.eta};
}

MeritPoint min_mi_over_times(const SchemeConfig &config, std::span<const double> times) {
  if (times.empty()) {
    throw std::invalid_argument("need at least one duration");
  }
  MeritPoint best = merit_point(config, times[0]);
  for (std::size_t i = 1; i < times.size(); ++i) {
    const MeritPoint p = merit_point(config, times[i]);
    if (p.mi < best.mi) best = p;
  }
  return best;
}

ThresholdAnalysis threshold_analytic(const RateParams &rates, int n, double t) {
  rates.validate();
  check_duration(t);
  if (n < 1) {
    throw std::domain_error("need at least one qubit");
  }
  if (!(rates.mu0 > 0) || !(rates.mu0 < rates.mu1)) {
    throw std::domain_error("analytic threshold needs 0 < mu0 < mu1");
  }
  ThresholdAnalysis a;
  a.alpha = rates.mu0 / rates.mu1;
  a.beta = (1 / a.alpha - 1) / std::log(1 / a.alpha);
  a.gamma0 = a.beta * std::log(a.beta) + 1 - a.beta;
  const double ab = a.alpha * a.beta;
  a.gamma1 = ab * std::log(ab) + 1 - ab;
  a.eta_analytic = rates.mu0 * n * t * a.beta;
  return a;
}

TailBounds ideal_tail_bounds(const RateParams &rates, int n, double t) {
  const ThresholdAnalysis a = threshold_analytic(rates, n, t);
  const double w0 = n * rates.mu0 * t;
  const double w1 = n * rates.mu1 * t;
  TailBounds b;
  b.k_eta = std::ceil(a.eta_analytic);
  const auto k = static_cast<std::size_t>(b.k_eta);
  b.error0 = poisson_upper_tail(w0, k);
  b.error1 = k == 0 ? 0.0 : poisson_lower_tail(w1, k - 1);
  b.bounds_valid = k >= 1 && b.k_eta > w0 && b.k_eta - 1 < w1;
  b.lower0 = std::exp(log_poisson_pmf(k, w0));
  b.upper0 = b.bounds_valid ? b.lower0 * b.k_eta / (b.k_eta - w0) : kInf;
  if (k >= 1) {
    b.lower1 = std::exp(log_poisson_pmf(k - 1, w1));
    b.upper1 = b.bounds_valid ? b.lower1 * w1 / (w1 - (b.k_eta - 1)) : kInf;
  }
  return b;
}

PeakSnr peak_snr(const SchemeConfig &config, const PeakSearchOptions &options) {
  config.validate();
  if (!(options.t_min > 0) || !(options.t_max > options.t_min) || options.grid_points < 3) {
    throw std::invalid_argument("invalid peak search options");
  }
  const PeakSnr unbounded{kInf, kInf, true};
  if (config.model == ReadoutModel::kIdealPoisson) {
    return unbounded;
  }
  const int m = options.grid_points;
  const double log_lo = std::log(options.t_min);
  const double log_step = (std::log(options.t_max) - log_lo) / (m - 1);
  std::vector<double> grid(m);
  std::vector<double> values(m);
  int best = 0;
  for (int i = 0; i < m; ++i) {
    grid[i] = std::exp(log_lo + i * log_step);
    values[i] = snr_at(config, grid[i]);
    if (values[i] > values[best]) best = i;
  }
  if (best == m - 1) {
    return unbounded;
  }

  // Golden-section search in log t around the best grid point.
  double a = best == 0 ? log_lo - log_step : std::log(grid[best - 1]);
  double b = std::log(grid[best + 1]);
  const double inv_phi = (std::sqrt(5.0) - 1) / 2;
  auto f = [&](double log_t) { return snr_at(config, std::exp(log_t)); };
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  // |log t| precision translates directly into relative t precision.
  while (b - a > options.rel_tol) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  PeakSnr peak{fc > fd ? fc : fd, std::exp(fc > fd ? c : d), false};
  if (values[best] > peak.s_max) {
    peak.s_max = values[best];
    peak.t_max = grid[best];
  }
  return peak;
}

std::optional<double> time_to_snr(const SchemeConfig &config, double target,
                                  const PeakSearchOptions &options) {
  if (!(target > 0) || !std::isfinite(target)) {
    throw std::invalid_argument("target SNR must be positive and finite");
  }
  const PeakSnr peak = peak_snr(config, options);
  double hi;
  if (peak.unbounded) {
    hi = options.t_min;
    while (snr_at(config, hi) < target) {
      hi *= 2;
      if (hi > 1e12) return std::nullopt;  // saturating curve below target
    }
  } else {
    if (peak.s_max < target) return std::nullopt;
    hi = peak.t_max;
  }
  double lo = hi;
  while (snr_at(config, lo) >= target) {
    lo /= 2;
    if (lo < 1e-300) return lo;
  }
  // Geometric bisection; SNR rises monotonically on (lo, hi].
  for (int iter = 0; iter < 400 && hi / lo - 1 > 1e-14; ++iter) {
    const double mid = std::sqrt(lo * hi);
    if (mid <= lo || mid >= hi) break;
    if (snr_at(config, mid) >= target) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

double gaussian_scheme_snr(double drift_rate, int n, double t) {
  if (!(drift_rate > 0) || !std::isfinite(drift_rate) || n < 1 || !(t > 0) || !std::isfinite(t)) {
    throw std::domain_error("Gaussian scheme needs positive drift rate, qubit count and duration");
  }
  // Means +-N z, variances N z each: 2 * 2 N z / (2 sqrt(N z)).
  const double z = drift_rate * t;
  return 2 * std::sqrt(n * z);
}

double snr_time_exponent(const SchemeConfig &config, double t_lo, double t_hi, int points) {
  if (!(t_lo > 0) || !(t_hi > t_lo) || points < 2) {
    throw std::invalid_argument("invalid fitting window");
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < points; ++i) {
    const double x = std::log(t_lo) + i * (std::log(t_hi) - std::log(t_lo)) / (points - 1);
    const double y = std::log(snr_at(config, std::exp(x)));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (points * sxy - sx * sy) / (points * sxx - sx * sx);
}

}  // namespace readout
