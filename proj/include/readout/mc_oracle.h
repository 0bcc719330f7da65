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

#ifndef READOUT_MC_ORACLE_H
#define READOUT_MC_ORACLE_H

#include <cstdint>
#include <vector>

#include "readout/cnot_noise.h"
#include "readout/dist.h"
#include "readout/gate_wiring.h"
#include "readout/rates.h"
#include "readout/scheme_stats.h"

namespace readout {

/// xoshiro256** seeded per shot. The four state words come from a SplitMix64
/// stream whose start is a hash of (seed, stream, shot), so any shot can be
/// replayed in isolation and results do not depend on thread scheduling.
class ShotRng {
 public:
  ShotRng(std::uint64_t seed, std::uint64_t stream, std::uint64_t shot);

  std::uint64_t next();
  /// Uniform on the open interval (0, 1), 53 bits.
  double uniform();
  bool bernoulli(double p);
  /// Exponential with the given rate; +inf when rate is 0.
  double exponential(double rate);
  /// Inversion below mean 30, PTRS transformed rejection above.
  std::uint64_t poisson(double mean);

 private:
  std::uint64_t s_[4];
};

/// Counts per bin over a fixed number of shots.
struct Histogram {
  std::vector<std::uint64_t> counts;
  std::uint64_t shots = 0;

  void add(std::size_t k);
  void merge(const Histogram &other);
  /// Empirical law counts / shots.
  DiscreteDist to_dist() const;
};

/// Samples the wiring with independent gate failures and histograms the
/// number of qubits ending in |1>. Throws std::domain_error for an invalid
/// wiring or p outside [0, 1].
OutcomeDist sample_gate_outcomes(const GateWiring &wiring, double p, std::uint64_t shots,
                                 std::uint64_t seed);

/// Photon counts of one qubit prepared in |initial_state> and read for t ms.
/// A bright qubit decays at most once.
Histogram sample_photon_counts(const RateParams &rates, int initial_state, double t,
                               std::uint64_t shots, std::uint64_t seed);

struct McConfig {
  std::uint64_t shots = 1'000'000;
  std::uint64_t seed = 0;
  SchemeConfig scheme;
  double t = 1.0;  ///< ms

  void validate() const;
};

struct SchemeSamples {
  Histogram h0;  ///< input |0>
  Histogram h1;  ///< input |1>
};

/// End-to-end trajectories: gate outcomes first, then every qubit's counts
/// given its post-gate state, summed.
SchemeSamples sample_full_scheme(const McConfig &config);

/// Worker threads used by the samplers (at least 1).
unsigned mc_worker_count();

}  // namespace readout

#endif  // READOUT_MC_ORACLE_H
