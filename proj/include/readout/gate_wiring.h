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

#ifndef READOUT_GATE_WIRING_H
#define READOUT_GATE_WIRING_H

#include <cstdint>
#include <vector>

#include "readout/cnot_noise.h"

namespace readout {

struct Cnot {
  int control;
  int target;
};

/// An ordered list of CNOTs fanning the root qubit's state out over an
/// n-qubit register. Gates act in list order.
struct GateWiring {
  int n_qubits = 1;
  int root = 0;
  std::vector<Cnot> gates;

  /// Requires an acyclic fan-out: every non-root qubit is targeted exactly
  /// once, the root never, and each control is the root or was targeted by
  /// an earlier gate. Throws std::domain_error otherwise.
  void validate() const;
};

/// Chain 0 -> 1 -> ... -> n-1.
GateWiring flat_wiring(int n);

/// Root in the middle, first gate to its right neighbour, then two chains
/// running outwards (left half ceil(n/2) qubits including the root).
GateWiring cascade_wiring(int n);

/// All-to-all doubling: at each step every qubit already holding the state
/// copies it to a fresh qubit.
GateWiring exponential_wiring(int n);

GateWiring wiring_for(Compilation compilation, int n);

/// Runs the wiring once with root in |1>. Bit g of `failures` says whether
/// gate g fails. Returns the final |1> mask.
std::uint64_t propagate(const GateWiring &wiring, std::uint64_t failures);

/// Exact outcome distribution by summing over all 2^gates failure patterns.
/// Limited to 24 gates.
OutcomeDist enumerate_outcomes(const GateWiring &wiring, double p);

}  // namespace readout

#endif  // READOUT_GATE_WIRING_H
