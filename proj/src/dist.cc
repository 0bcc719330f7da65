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

#include "readout/dist.h"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>

#include "readout/rates.h"

namespace readout {

void RateParams::validate() const {
  if (!std::isfinite(mu0) || !std::isfinite(mu1) || !std::isfinite(lambda)) {
    throw std::domain_error("rates must be finite");
  }
  if (mu0 < 0 || mu1 < mu0) {
    throw std::domain_error("rates must satisfy 0 <= mu0 <= mu1");
  }
  if (lambda < 0) {
    throw std::domain_error("decay rate must be non-negative");
  }
}

DiscreteDist::DiscreteDist() : offset_(0), masses_{1.0}, truncation_loss_(0.0) {}

DiscreteDist::DiscreteDist(std::size_t offset, std::vector<double> masses, double truncation_loss)
    : offset_(offset), masses_(std::move(masses)), truncation_loss_(truncation_loss) {
  if (masses_.empty()) {
    throw std::invalid_argument("distribution needs at least one support point");
  }
  if (!std::isfinite(truncation_loss_) || truncation_loss_ < 0) {
    throw std::invalid_argument("truncation loss must be finite and non-negative");
  }
  double total = 0;
  for (double m : masses_) {
    if (!std::isfinite(m) || m < 0) {
      throw std::invalid_argument("masses must be finite and non-negative");
    }
    total += m;
  }
  if (std::abs(total + truncation_loss_ - 1.0) > 1e-9) {
    throw std::invalid_argument("distribution not normalized: mass " + std::to_string(total) +
                                " + loss " + std::to_string(truncation_loss_));
  }
}

DiscreteDist DiscreteDist::point_mass(std::size_t k) { return DiscreteDist(k, {1.0}); }

double DiscreteDist::pmf(std::size_t k) const {
  if (k < offset_ || k >= end()) {
    return 0.0;
  }
  return masses_[k - offset_];
}

double DiscreteDist::total_mass() const {
  double total = 0;
  for (double m : masses_) {
    total += m;
  }
  return total;
}

DiscreteDist trimmed(std::size_t offset, std::vector<double> masses, double truncation_loss,
                     double budget) {
  if (masses.empty()) {
    throw std::invalid_argument("cannot trim an empty support");
  }
  const double side_budget = budget / 2;
  std::size_t lo = 0;
  double dropped_lo = 0;
  while (lo + 1 < masses.size() && dropped_lo + masses[lo] <= side_budget) {
    dropped_lo += masses[lo];
    ++lo;
  }
  std::size_t hi = masses.size();
  double dropped_hi = 0;
  while (hi - 1 > lo && dropped_hi + masses[hi - 1] <= side_budget) {
    dropped_hi += masses[hi - 1];
    --hi;
  }
  if (hi - lo > kMaxSupport) {
    throw std::length_error("support exceeds " + std::to_string(kMaxSupport) + " points");
  }
  std::vector<double> kept(masses.begin() + static_cast<std::ptrdiff_t>(lo),
                           masses.begin() + static_cast<std::ptrdiff_t>(hi));
  return DiscreteDist(offset + lo, std::move(kept), truncation_loss + dropped_lo + dropped_hi);
}

namespace detail {

double stirling_error(double k) {
  constexpr double kS0 = 1.0 / 12;
  constexpr double kS1 = 1.0 / 360;
  constexpr double kS2 = 1.0 / 1260;
  constexpr double kS3 = 1.0 / 1680;
  constexpr double kS4 = 1.0 / 1188;
  if (k <= 15) {
    return std::lgamma(k + 1) - (k + 0.5) * std::log(k) + k -
           0.5 * std::log(2 * std::numbers::pi);
  }
  const double kk = k * k;
  if (k > 500) return (kS0 - kS1 / kk) / k;
  if (k > 80) return (kS0 - (kS1 - kS2 / kk) / kk) / k;
  if (k > 35) return (kS0 - (kS1 - (kS2 - kS3 / kk) / kk) / kk) / k;
  return (kS0 - (kS1 - (kS2 - (kS3 - kS4 / kk) / kk) / kk) / kk) / k;
}

double poisson_deviance(double x, double m) {
  if (std::abs(x - m) < 0.1 * (x + m)) {
    double v = (x - m) / (x + m);
    double s = (x - m) * v;
    double ej = 2 * x * v;
    v *= v;
    for (int j = 1; j < 1000; ++j) {
      ej *= v;
      const double next = s + ej / (2 * j + 1);
      if (next == s) {
        return next;
      }
      s = next;
    }
    return s;
  }
  return x * std::log(x / m) + m - x;
}

}  // namespace detail

namespace {

// log of a pmf value below which a support point is never materialized.
constexpr double kLogNegligible = -46.0;  // ~1e-20

// FFTW's planner is not reentrant; plan creation and destruction are serialized.
std::mutex fftw_planner_mutex;

struct FftwFree {
  void operator()(void *p) const { fftw_free(p); }
};
template <typename T>
using FftwBuffer = std::unique_ptr<T, FftwFree>;

class FftwPlan {
 public:
  template <typename Make>
  explicit FftwPlan(Make make) {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex);
    plan_ = make();
  }
  FftwPlan(const FftwPlan &) = delete;
  FftwPlan &operator=(const FftwPlan &) = delete;
  ~FftwPlan() {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex);
    fftw_destroy_plan(plan_);
  }
  void execute() const { fftw_execute(plan_); }

 private:
  fftw_plan plan_;
};

std::size_t fft_size(std::size_t n) {
  std::size_t best = 1;
  while (best < n) best <<= 1;
  // Prefer 2^a 3^b 5^c sizes, which FFTW handles efficiently.
  for (std::size_t p3 = 1; p3 < best; p3 *= 3) {
    for (std::size_t p5 = p3; p5 < best; p5 *= 5) {
      std::size_t v = p5;
      while (v < n) v <<= 1;
      best = std::min(best, v);
    }
  }
  return best;
}

}  // namespace

double log_poisson_pmf(std::size_t k, double omega) {
  if (omega == 0) {
    return k == 0 ? 0.0 : -INFINITY;
  }
  if (k == 0) {
    return -omega;
  }
  const double x = static_cast<double>(k);
  return -detail::stirling_error(x) - detail::poisson_deviance(x, omega) - 0.5 * std::log(2 * std::numbers::pi * x);
}

DiscreteDist poisson_pmf(double omega) {
  if (!std::isfinite(omega) || omega < 0) {
    throw std::domain_error("Poisson mean must be finite and non-negative");
  }
  if (omega == 0) {
    return DiscreteDist::point_mass(0);
  }
  const auto [lo, hi] = detail::poisson_support_bounds(omega);
  std::vector<double> masses(hi - lo);
  for (std::size_t k = lo; k < hi; ++k) {
    masses[k - lo] = std::exp(log_poisson_pmf(k, omega));
  }
  // Mass beyond the materialized range is below 1e-19 and is not booked.
  return trimmed(lo, std::move(masses), 0.0);
}

namespace detail {

std::pair<std::size_t, std::size_t> poisson_support_bounds(double omega) {
  if (omega == 0) {
    return {0, 1};
  }
  const auto mode = static_cast<std::size_t>(std::floor(omega));
  std::size_t lo = mode;
  while (lo > 0 && log_poisson_pmf(lo - 1, omega) > kLogNegligible) {
    --lo;
  }
  std::size_t hi = mode + 1;
  while (log_poisson_pmf(hi, omega) > kLogNegligible) {
    ++hi;
  }
  return {lo, hi};
}

std::vector<double> convolve_direct(std::span<const double> a, std::span<const double> b) {
  std::vector<double> out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double ai = a[i];
    if (ai == 0) continue;
    double *dst = out.data() + i;
    for (std::size_t j = 0; j < b.size(); ++j) {
      dst[j] += ai * b[j];
    }
  }
  return out;
}

std::vector<double> convolve_fft(std::span<const double> a, std::span<const double> b) {
  const std::size_t n_out = a.size() + b.size() - 1;
  const std::size_t n = fft_size(n_out);
  const std::size_t n_freq = n / 2 + 1;

  FftwBuffer<double> buf_a(fftw_alloc_real(n));
  FftwBuffer<double> buf_b(fftw_alloc_real(n));
  FftwBuffer<fftw_complex> freq_a(fftw_alloc_complex(n_freq));
  FftwBuffer<fftw_complex> freq_b(fftw_alloc_complex(n_freq));
  const int len = static_cast<int>(n);
  FftwPlan forward_a(
      [&] { return fftw_plan_dft_r2c_1d(len, buf_a.get(), freq_a.get(), FFTW_ESTIMATE); });
  FftwPlan forward_b(
      [&] { return fftw_plan_dft_r2c_1d(len, buf_b.get(), freq_b.get(), FFTW_ESTIMATE); });
  FftwPlan backward(
      [&] { return fftw_plan_dft_c2r_1d(len, freq_a.get(), buf_a.get(), FFTW_ESTIMATE); });

  std::fill(buf_a.get(), buf_a.get() + n, 0.0);
  std::fill(buf_b.get(), buf_b.get() + n, 0.0);
  std::copy(a.begin(), a.end(), buf_a.get());
  std::copy(b.begin(), b.end(), buf_b.get());
  forward_a.execute();
  forward_b.execute();
  fftw_complex *fa = freq_a.get();
  const fftw_complex *fb = freq_b.get();
  for (std::size_t i = 0; i < n_freq; ++i) {
    const std::complex<double> z =
        std::complex<double>(fa[i][0], fa[i][1]) * std::complex<double>(fb[i][0], fb[i][1]);
    fa[i][0] = z.real();
    fa[i][1] = z.imag();
  }
  backward.execute();

  std::vector<double> out(n_out);
  const double scale = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n_out; ++i) {
    // Round-off can leave tiny negative values in empty tails.
    out[i] = std::max(0.0, buf_a.get()[i] * scale);
  }
  return out;
}

}  // namespace detail

DiscreteDist convolve(const DiscreteDist &a, const DiscreteDist &b) {
  const double loss = a.truncation_loss() + b.truncation_loss() -
                      a.truncation_loss() * b.truncation_loss();
  // A single-point operand only shifts and scales; no fresh tails to trim.
  if (a.size() == 1 || b.size() == 1) {
    const DiscreteDist &point = a.size() == 1 ? a : b;
    const DiscreteDist &other = a.size() == 1 ? b : a;
    std::vector<double> masses = other.masses();
    if (point.masses()[0] != 1.0) {
      for (double &m : masses) m *= point.masses()[0];
    }
    return DiscreteDist(a.offset() + b.offset(), std::move(masses), loss);
  }
  const bool use_fft = a.size() >= kFftThreshold && b.size() >= kFftThreshold;
  std::vector<double> masses = use_fft ? detail::convolve_fft(a.masses(), b.masses())
                                       : detail::convolve_direct(a.masses(), b.masses());
  return trimmed(a.offset() + b.offset(), std::move(masses), loss);
}

DiscreteDist n_fold_convolve(const DiscreteDist &d, std::size_t n) {
  DiscreteDist result;
  if (n == 0) {
    return result;
  }
  DiscreteDist power = d;
  bool have_result = false;
  while (true) {
    if (n & 1) {
      result = have_result ? convolve(result, power) : power;
      have_result = true;
    }
    n >>= 1;
    if (n == 0) break;
    power = convolve(power, power);
  }
  return result;
}

DiscreteDist mixture(std::span<const double> weights, std::span<const DiscreteDist> dists,
                     double skip_below) {
  if (weights.size() != dists.size() || weights.empty()) {
    throw std::invalid_argument("mixture needs one weight per distribution");
  }
  std::size_t lo = SIZE_MAX;
  std::size_t hi = 0;
  for (std::size_t i = 0; i < dists.size(); ++i) {
    if (weights[i] < 0 || !std::isfinite(weights[i])) {
      throw std::invalid_argument("mixture weights must be finite and non-negative");
    }
    if (weights[i] < skip_below || weights[i] == 0) continue;
    lo = std::min(lo, dists[i].offset());
    hi = std::max(hi, dists[i].end());
  }
  if (lo == SIZE_MAX) {
    throw std::invalid_argument("mixture has no component above the skip threshold");
  }
  std::vector<double> masses(hi - lo, 0.0);
  double loss = 0;
  double used = 0;
  for (std::size_t i = 0; i < dists.size(); ++i) {
    const double w = weights[i];
    if (w < skip_below || w == 0) continue;
    used += w;
    loss += w * dists[i].truncation_loss();
    const auto &src = dists[i].masses();
    double *dst = masses.data() + (dists[i].offset() - lo);
    for (std::size_t j = 0; j < src.size(); ++j) {
      dst[j] += w * src[j];
    }
  }
  double total = 0;
  for (double w : weights) total += w;
  loss += std::max(0.0, total - used);
  return trimmed(lo, std::move(masses), loss);
}

Moments moments(const DiscreteDist &d) {
  const auto &m = d.masses();
  const double base = static_cast<double>(d.offset());
  double mean_rel = 0;
  double total = 0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    mean_rel += static_cast<double>(i) * m[i];
    total += m[i];
  }
  // Deviations are taken on the relative index to keep the sum well conditioned.
  double var = 0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    const double dev = static_cast<double>(i) - mean_rel;
    var += dev * dev * m[i];
  }
  return Moments{base * total + mean_rel, var};
}

double tail_ge(const DiscreteDist &d, double eta) {
  if (std::isnan(eta)) {
    throw std::invalid_argument("threshold is NaN");
  }
  if (eta <= static_cast<double>(d.offset())) {
    return d.total_mass();
  }
  if (eta > static_cast<double>(d.end() - 1)) {
    return 0.0;
  }
  const auto first = static_cast<std::size_t>(std::ceil(eta));
  const auto &m = d.masses();
  double sum = 0;
  for (std::size_t i = m.size(); i-- > first - d.offset();) {
    sum += m[i];
  }
  return sum;
}

double head_lt(const DiscreteDist &d, double eta) {
  if (std::isnan(eta)) {
    throw std::invalid_argument("threshold is NaN");
  }
  if (eta <= static_cast<double>(d.offset())) {
    return 0.0;
  }
  if (eta > static_cast<double>(d.end() - 1)) {
    return d.total_mass();
  }
  const auto first = static_cast<std::size_t>(std::ceil(eta));
  const auto &m = d.masses();
  double sum = 0;
  for (std::size_t i = 0; i < first - d.offset(); ++i) {
    sum += m[i];
  }
  return sum;
}

double tv_distance(const DiscreteDist &a, const DiscreteDist &b) {
  const std::size_t lo = std::min(a.offset(), b.offset());
  const std::size_t hi = std::max(a.end(), b.end());
  double sum = 0;
  for (std::size_t k = lo; k < hi; ++k) {
    sum += std::abs(a.pmf(k) - b.pmf(k));
  }
  return std::min(1.0, 0.5 * sum);
}

}  // namespace readout
