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

#ifndef READOUT_DIST_H
#define READOUT_DIST_H

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace readout {

/// Probability mass dropped from the two ends of a support when trimming.
/// Half of the budget is spent on each side.
inline constexpr double kTrimBudget = 1e-12;

/// Largest support any distribution may keep after trimming.
inline constexpr std::size_t kMaxSupport = 1'000'000;

/// Supports at or above this size (in both operands) use the FFT path.
inline constexpr std::size_t kFftThreshold = 4096;

/// Finite-support probability mass function over non-negative integer counts.
///
/// Mass for count `k` lives at `masses()[k - offset()]`. Mass that was
/// dropped by truncation is tracked in `truncation_loss()` so that
/// `sum(masses) + truncation_loss` stays within 1e-9 of one.
///
/// Instances are immutable; every operation in this header is a pure function.
class DiscreteDist {
 public:
  /// Point mass at zero.
  DiscreteDist();

  /// Validates the invariants and throws std::invalid_argument on violation.
  DiscreteDist(std::size_t offset, std::vector<double> masses, double truncation_loss = 0.0);

  static DiscreteDist point_mass(std::size_t k);

  std::size_t offset() const { return offset_; }
  /// One past the largest stored count.
  std::size_t end() const { return offset_ + masses_.size(); }
  std::size_t size() const { return masses_.size(); }
  const std::vector<double> &masses() const { return masses_; }
  double truncation_loss() const { return truncation_loss_; }

  /// Mass at count k; zero outside the stored support.
  double pmf(std::size_t k) const;
  double operator()(std::size_t k) const { return pmf(k); }

  /// Sum of the stored masses.
  double total_mass() const;

 private:
  std::size_t offset_;
  std::vector<double> masses_;
  double truncation_loss_;
};

struct Moments {
  double mean = 0.0;
  double variance = 0.0;
};

/// Drops leading and trailing mass (at most `budget` in total) and builds the
/// distribution, adding the dropped mass to `truncation_loss`.
/// Throws std::length_error if more than kMaxSupport points remain.
DiscreteDist trimmed(std::size_t offset, std::vector<double> masses, double truncation_loss,
                     double budget = kTrimBudget);

/// Natural log of the Poisson pmf L_omega(k), accurate for large k and omega
/// (saddle-point form, no lgamma cancellation).
double log_poisson_pmf(std::size_t k, double omega);

/// Poisson pmf L_omega truncated so that truncation_loss <= 1e-12.
/// Throws std::domain_error for negative or non-finite omega.
DiscreteDist poisson_pmf(double omega);

/// Convolution of two distributions. Direct summation when either support is
/// below kFftThreshold, FFT otherwise.
DiscreteDist convolve(const DiscreteDist &a, const DiscreteDist &b);

/// d convolved with itself n times by binary exponentiation. n = 0 gives a
/// point mass at zero (the empty convolution).
DiscreteDist n_fold_convolve(const DiscreteDist &d, std::size_t n);

/// Weighted sum of distributions. Weights below `skip_below` are dropped and
/// their weight is booked as truncation loss.
DiscreteDist mixture(std::span<const double> weights, std::span<const DiscreteDist> dists,
                     double skip_below = 0.0);

/// Exact weighted sums over the stored support.
Moments moments(const DiscreteDist &d);

/// Mass at counts k >= eta. Non-integer eta is rounded up. NaN throws
/// std::invalid_argument.
double tail_ge(const DiscreteDist &d, double eta);

/// Mass at counts k < eta; tail_ge + head_lt = total_mass().
double head_lt(const DiscreteDist &d, double eta);

/// Half the L1 distance over the union of stored supports. Truncation loss
/// is not counted.
double tv_distance(const DiscreteDist &a, const DiscreteDist &b);

namespace detail {
/// Half-open range of counts whose Poisson pmf exceeds ~1e-20.
std::pair<std::size_t, std::size_t> poisson_support_bounds(double omega);
/// log(k!) minus its Stirling approximation.
double stirling_error(double k);
/// x log(x / m) + m - x without cancellation near x = m.
double poisson_deviance(double x, double m);
std::vector<double> convolve_direct(std::span<const double> a, std::span<const double> b);
std::vector<double> convolve_fft(std::span<const double> a, std::span<const double> b);
}  // namespace detail

}  // namespace readout

#endif  // READOUT_DIST_H
