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

#ifndef READOUT_CNOT_NOISE_H
#define READOUT_CNOT_NOISE_H

#include <string_view>
#include <utility>
#include <vector>

namespace readout {

enum class Compilation { kFlat, kCascade };

std::string_view to_string(Compilation c);
/// Accepts "flat" or "cascade"; throws std::invalid_argument otherwise.
Compilation parse_compilation(std::string_view name);

/// Noisy CNOT model: immediately before each gate a control in |1> falls to
/// |0> with probability p, after which the gate cannot flip its target.
struct GateNoise {
  double p = 0.01;
  Compilation compilation = Compilation::kCascade;

  /// Throws std::domain_error unless 0 <= p <= 1.
  void validate() const;
};

/// Distribution of the number q of qubits (out of n) left in the nominal
/// state after entangling. probs has n + 1 entries indexed by q.
struct OutcomeDist {
  int n_qubits = 1;
  std::vector<double> probs;

  double mean() const;
  double variance() const;

  /// Checks length n + 1, non-negative entries and normalization to 1e-12.
  /// Throws std::invalid_argument on failure.
  void validate() const;
};

/// Point mass at q = n: every CNOT succeeded.
OutcomeDist noiseless_outcome(int n);

/// Chain compilation q1 -> q2 -> ... -> qn.
/// probs[q] = (1-p)^q p for q <= n-2, probs[n] = (1-p)^(n-1), probs[n-1] = 0.
OutcomeDist flat_dist(int n, const GateNoise &noise);

/// Cascade compilation: one CNOT splits the register into two flat chains of
/// sizes ceil(n/2) and floor(n/2), so
///   T = (1-p) (flat_{ceil(n/2)} * flat_{floor(n/2)}) + p delta_0.
OutcomeDist cascade_dist(int n, const GateNoise &noise);

/// The cascade distribution from the expanded piecewise closed forms (even
/// and odd n written out term by term). Must agree with cascade_dist.
OutcomeDist cascade_dist_expanded(int n, const GateNoise &noise);

/// Dispatches on noise.compilation.
OutcomeDist outcome_dist(int n, const GateNoise &noise);

/// Validated pair (T_|0>, T_|1>) for externally measured gate statistics.
/// For input |0> q counts qubits ending in |0>; for |1>, qubits in |1>.
/// The structural probs[n-1] = 0 rule of the built-in compilations is not
/// required here.
std::pair<OutcomeDist, OutcomeDist> general_t_pair(int n, OutcomeDist t0, OutcomeDist t1);

}  // namespace readout

#endif  // READOUT_CNOT_NOISE_H
