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

#include "readout/gate_wiring.h"

#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>

namespace readout {

namespace {

bool has_cycle(const GateWiring &w) {
  std::vector<std::vector<int>> next(w.n_qubits);
  for (const Cnot &g : w.gates) next[g.control].push_back(g.target);
  // 0 = unvisited, 1 = on stack, 2 = done
  std::vector<int> state(w.n_qubits, 0);
  std::vector<std::pair<int, std::size_t>> stack;
  for (int start = 0; start < w.n_qubits; ++start) {
    if (state[start] != 0) continue;
    stack.emplace_back(start, 0);
    state[start] = 1;
    while (!stack.empty()) {
      auto &[node, idx] = stack.back();
      if (idx < next[node].size()) {
        const int to = next[node][idx++];
        if (state[to] == 1) return true;
        if (state[to] == 0) {
          state[to] = 1;
          stack.emplace_back(to, 0);
        }
      } else {
        state[node] = 2;
        stack.pop_back();
      }
    }
  }
  return false;
}

}  // namespace

void GateWiring::validate() const {
  if (n_qubits < 1 || n_qubits > 64) {
    throw std::domain_error("wiring supports 1 to 64 qubits");
  }
  if (root < 0 || root >= n_qubits) {
    throw std::domain_error("root qubit out of range");
  }
  for (const Cnot &g : gates) {
    if (g.control < 0 || g.control >= n_qubits || g.target < 0 || g.target >= n_qubits) {
      throw std::domain_error("gate qubit index out of range");
    }
    if (g.control == g.target) {
      throw std::domain_error("gate control and target coincide");
    }
  }
  if (has_cycle(*this)) {
    throw std::domain_error("wiring is cyclic");
  }
  std::vector<bool> reached(n_qubits, false);
  reached[root] = true;
  for (std::size_t i = 0; i < gates.size(); ++i) {
    const Cnot &g = gates[i];
    if (!reached[g.control]) {
      throw std::domain_error("gate " + std::to_string(i) + " uses control " +
                              std::to_string(g.control) + " before it holds the state");
    }
    if (reached[g.target]) {
      throw std::domain_error("qubit " + std::to_string(g.target) + " is targeted twice");
    }
    reached[g.target] = true;
  }
  for (int q = 0; q < n_qubits; ++q) {
    if (!reached[q]) {
      throw std::domain_error("qubit " + std::to_string(q) + " is never reached");
    }
  }
}

GateWiring flat_wiring(int n) {
  GateWiring w{n, 0, {}};
  for (int q = 0; q + 1 < n; ++q) w.gates.push_back({q, q + 1});
  return w;
}

GateWiring cascade_wiring(int n) {
  const int left = (n + 1) / 2;
  GateWiring w{n, left - 1, {}};
  if (n == 1) return w;
  w.gates.push_back({left - 1, left});
  // Both chains advance one step per layer.
  for (int step = 1; step < left; ++step) {
    w.gates.push_back({left - step, left - step - 1});
    if (left + step < n) w.gates.push_back({left + step - 1, left + step});
  }
  return w;
}

GateWiring exponential_wiring(int n) {
  GateWiring w{n, 0, {}};
  int holders = 1;
  while (holders < n) {
    const int layer = holders;
    for (int c = 0; c < layer && holders < n; ++c) {
      w.gates.push_back({c, holders++});
    }
  }
  return w;
}

GateWiring wiring_for(Compilation compilation, int n) {
  return compilation == Compilation::kFlat ? flat_wiring(n) : cascade_wiring(n);
}

std::uint64_t propagate(const GateWiring &wiring, std::uint64_t failures) {
  std::uint64_t ones = std::uint64_t{1} << wiring.root;
  for (std::size_t i = 0; i < wiring.gates.size(); ++i) {
    const Cnot &g = wiring.gates[i];
    const std::uint64_t control_bit = std::uint64_t{1} << g.control;
    if (!(ones & control_bit)) continue;  // |00> is left alone
    if ((failures >> i) & 1) {
      ones &= ~control_bit;  // control decays before the gate acts
    } else {
      ones |= std::uint64_t{1} << g.target;
    }
  }
  return ones;
}

OutcomeDist enumerate_outcomes(const GateWiring &wiring, double p) {
  wiring.validate();
  if (!(p >= 0 && p <= 1)) {
    throw std::domain_error("gate failure probability must lie in [0, 1]");
  }
  const std::size_t n_gates = wiring.gates.size();
  if (n_gates > 24) {
    throw std::domain_error("exhaustive enumeration is limited to 24 gates");
  }
  OutcomeDist out{wiring.n_qubits, std::vector<double>(wiring.n_qubits + 1, 0.0)};
  const std::uint64_t patterns = std::uint64_t{1} << n_gates;
  for (std::uint64_t f = 0; f < patterns; ++f) {
    const int fails = std::popcount(f);
    const double weight =
        std::pow(p, fails) * std::pow(1 - p, static_cast<int>(n_gates) - fails);
    out.probs[std::popcount(propagate(wiring, f))] += weight;
  }
  return out;
}

}  // namespace readout
