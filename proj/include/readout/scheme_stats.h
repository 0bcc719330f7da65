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

#ifndef READOUT_SCHEME_STATS_H
#define READOUT_SCHEME_STATS_H

#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "readout/cnot_noise.h"
#include "readout/dist.h"
#include "readout/rates.h"

namespace readout {

enum class ReadoutModel {
  kIdealPoisson,     ///< perfect CNOTs, pure Poisson emission
  kNoisyDecaying,    ///< noisy CNOTs on |1> plus single decay during readout
  kGeneralInjected,  ///< user-supplied gate statistics and single-qubit laws
};

std::string_view to_string(ReadoutModel m);

/// Single-qubit readout laws P_|0>,t and P_|1>,t at one duration.
struct SingleQubitLaws {
  DiscreteDist dark;
  DiscreteDist bright;
};

using LawProvider = std::function<SingleQubitLaws(double t_ms)>;

/// Looks up laws by exact duration; no interpolation between entries.
/// The returned provider throws std::out_of_range for an unknown duration.
LawProvider tabulated_laws(std::vector<std::pair<double, SingleQubitLaws>> table);

struct InjectedModel {
  OutcomeDist t0;  ///< qubits ending in |0> for input |0>
  OutcomeDist t1;  ///< qubits ending in |1> for input |1>
  LawProvider laws;
};

struct SchemeConfig {
  int n_qubits = 1;
  RateParams rates;
  GateNoise noise;
  ReadoutModel model = ReadoutModel::kNoisyDecaying;
  /// Required for kGeneralInjected, ignored otherwise.
  std::optional<InjectedModel> injected;

  /// Throws std::domain_error / std::invalid_argument on bad values.
  void validate() const;
};

/// Soft cap on register size; beyond it supports grow impractically large.
inline constexpr int kMaxQubits = 64;

/// Composite count distributions for both inputs at one duration.
struct CompositeStats {
  DiscreteDist p0;
  DiscreteDist p1;
  Moments m0;
  Moments m1;
  double t = 0.0;
};

/// Builds (P_|0>, P_|1>) for an N-qubit scheme read out for t ms.
///   ideal:    P_j = L_{N mu_j t}
///   noisy:    P_0 = L_{N mu0 t},  P_1 = sum_q T(q) W^{*q} * L_{(N-q) mu0 t}
///   injected: P_j = sum_q T_j(q) P_j^{*q} * P_jbar^{*(N-q)}
/// Mixture terms with T(q) < 1e-15 are skipped.
CompositeStats compose(const SchemeConfig &config, double t);

/// 2 |mean0 - mean1| / (std0 + std1). Zero when the means coincide, +inf
/// when both variances vanish and the means differ.
double snr(const Moments &m0, const Moments &m1);
double snr_direct(const CompositeStats &stats);

/// SNR of the N-qubit scheme from gate statistics and single-qubit moments
/// alone; never builds the composite distributions.
double snr_general(const OutcomeDist &t0, const OutcomeDist &t1, const Moments &dark,
                   const Moments &bright, int n);

/// The (T_|0>, T_|1>) pair a configuration implies.
std::pair<OutcomeDist, OutcomeDist> gate_statistics(const SchemeConfig &config);

/// Single-qubit moments (dark, bright) at duration t.
std::pair<Moments, Moments> single_qubit_moments(const SchemeConfig &config, double t);

/// snr_general for a configuration at duration t. t = 0 gives 0.
double snr_at(const SchemeConfig &config, double t);

struct MiResult {
  double mi = 0.5;
  double eta = 0.0;  ///< integer threshold in counts; k >= eta reads as 1
};

/// (P_|0>(k >= eta) + P_|1>(k < eta)) / 2.
double mi_at_threshold(const CompositeStats &stats, double eta);

/// Exhaustive scan over integer thresholds spanning both supports. Ties go
/// to the smallest threshold.
MiResult mi_optimal(const CompositeStats &stats);

struct MeritPoint {
  int n = 1;
  double t = 0.0;
  double snr = 0.0;
  double mi = 0.5;
  double eta_opt = 0.0;
};

MeritPoint merit_point(const SchemeConfig &config, double t);

/// The MeritPoint with the smallest MI over a grid of durations.
MeritPoint min_mi_over_times(const SchemeConfig &config, std::span<const double> times);

/// Closed-form threshold analysis for ideal Poisson readout.
struct ThresholdAnalysis {
  double alpha = 0;         ///< mu0 / mu1
  double beta = 0;          ///< (1/alpha - 1) / ln(1/alpha)
  double gamma0 = 0;        ///< beta ln beta + 1 - beta
  double gamma1 = 0;        ///< alpha beta ln(alpha beta) + 1 - alpha beta
  double eta_analytic = 0;  ///< mu0 N t beta, where L_{mu1 N t} and L_{mu0 N t} cross
};

/// Throws std::domain_error unless 0 < mu0 < mu1.
ThresholdAnalysis threshold_analytic(const RateParams &rates, int n, double t);

/// Error probabilities of ideal readout at the analytic threshold together
/// with their leading-term (lower) and geometric-series (upper) bounds.
struct TailBounds {
  double k_eta = 0;  ///< ceil(eta)
  double error0 = 0, lower0 = 0, upper0 = 0;
  double error1 = 0, lower1 = 0, upper1 = 0;
  /// The geometric bounds need k_eta > mu0 N t and k_eta - 1 < mu1 N t.
  bool bounds_valid = false;
};

TailBounds ideal_tail_bounds(const RateParams &rates, int n, double t);

/// Search settings for peak_snr and time_to_snr.
struct PeakSearchOptions {
  double t_min = 1e-3;  ///< ms
  double t_max = 1e3;   ///< ms
  int grid_points = 64;
  double rel_tol = 1e-6;
};

struct PeakSnr {
  double s_max = 0;
  double t_max = 0;
  /// SNR still rises at the end of the search range (e.g. no decay).
  bool unbounded = false;
};

/// Coarse log grid followed by golden-section refinement. Ideal models and
/// curves whose maximum sits on the last grid point report `unbounded`.
PeakSnr peak_snr(const SchemeConfig &config, const PeakSearchOptions &options = {});

/// Smallest t on the rising branch with SNR(t) >= target, to relative
/// precision well below 1e-9. std::nullopt when the peak stays below target.
std::optional<double> time_to_snr(const SchemeConfig &config, double target,
                                  const PeakSearchOptions &options = {});

/// Analytic SNR of N Gaussian readouts whose means +-z(t) and variances |z(t)|
/// grow linearly, z(t) = drift_rate t: returns 2 sqrt(N z(t)).
double gaussian_scheme_snr(double drift_rate, int n, double t);

/// Slope of log SNR against log t by least squares over `points` log-spaced
/// durations in [t_lo, t_hi].
double snr_time_exponent(const SchemeConfig &config, double t_lo, double t_hi, int points = 16);

}  // namespace readout

#endif  // READOUT_SCHEME_STATS_H
