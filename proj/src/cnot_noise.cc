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

#include "readout/cnot_noise.h"

#include <cmath>
#include <stdexcept>
#include <string>

namespace readout {

std::string_view to_string(Compilation c) {
  return c == Compilation::kFlat ? "flat" : "cascade";
}

Compilation parse_compilation(std::string_view name) {
  if (name == "flat") return Compilation::kFlat;
  if (name == "cascade") return Compilation::kCascade;
  throw std::invalid_argument("unknown compilation '" + std::string(name) + "'");
}

void GateNoise::validate() const {
  if (!(p >= 0 && p <= 1)) {
    throw std::domain_error("gate failure probability must lie in [0, 1]");
  }
}

double OutcomeDist::mean() const {
  double m = 0;
  for (std::size_t q = 0; q < probs.size(); ++q) {
    m += static_cast<double>(q) * probs[q];
  }
  return m;
}

double OutcomeDist::variance() const {
  const double m = mean();
  double v = 0;
  for (std::size_t q = 0; q < probs.size(); ++q) {
    const double d = static_cast<double>(q) - m;
    v += d * d * probs[q];
  }
  return v;
}

void OutcomeDist::validate() const {
  if (n_qubits < 1) {
    throw std::invalid_argument("outcome distribution needs at least one qubit");
  }
  if (probs.size() != static_cast<std::size_t>(n_qubits) + 1) {
    throw std::invalid_argument("outcome distribution for " + std::to_string(n_qubits) +
                                " qubits needs " + std::to_string(n_qubits + 1) +
                                " entries, got " + std::to_string(probs.size()));
  }
  double total = 0;
  for (double v : probs) {
    if (!std::isfinite(v) || v < 0) {
      throw std::invalid_argument("outcome probabilities must be finite and non-negative");
    }
    total += v;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw std::invalid_argument("outcome probabilities do not sum to one");
  }
}

OutcomeDist noiseless_outcome(int n) {
  if (n < 1) {
    throw std::domain_error("need at least one qubit");
  }
  OutcomeDist out{n, std::vector<double>(n + 1, 0.0)};
  out.probs[n] = 1.0;
  return out;
}

OutcomeDist flat_dist(int n, const GateNoise &noise) {
  if (n < 1) {
    throw std::domain_error("need at least one qubit");
  }
  noise.validate();
  const double p = noise.p;
  OutcomeDist out{n, std::vector<double>(n + 1, 0.0)};
  // Gates 1..q succeed, gate q+1 fails and takes its control down with it.
  for (int q = 0; q <= n - 2; ++q) {
    out.probs[q] = std::pow(1 - p, q) * p;
  }
  out.probs[n] = std::pow(1 - p, n - 1);
  return out;
}

OutcomeDist cascade_dist(int n, const GateNoise &noise) {
  if (n < 1) {
    throw std::domain_error("need at least one qubit");
  }
  noise.validate();
  if (n == 1) {
    return noiseless_outcome(1);
  }
  const double p = noise.p;
  const OutcomeDist left = flat_dist((n + 1) / 2, noise);
  const OutcomeDist right = flat_dist(n / 2, noise);
  OutcomeDist out{n, std::vector<double>(n + 1, 0.0)};
  for (std::size_t i = 0; i < left.probs.size(); ++i) {
    for (std::size_t j = 0; j < right.probs.size(); ++j) {
      out.probs[i + j] += (1 - p) * left.probs[i] * right.probs[j];
    }
  }
  out.probs[0] += p;
  return out;
}

OutcomeDist cascade_dist_expanded(int n, const GateNoise &noise) {
  if (n < 1) {
    throw std::domain_error("need at least one qubit");
  }
  noise.validate();
  if (n == 1) {
    return noiseless_outcome(1);
  }
  const double p = noise.p;
  const int h = n / 2;
  auto in = [](int lo, int q, int hi) { return lo <= q && q <= hi ? 1.0 : 0.0; };
  OutcomeDist out{n, std::vector<double>(n + 1, 0.0)};
  for (int q = 0; q <= n; ++q) {
    const double a = std::pow(1 - p, q + 1) * p * p;
    const double b = std::pow(1 - p, q) * p;
    double v;
    if (n % 2 == 0) {
      v = a * ((q + 1) * in(0, q, h - 2) + (2 * h - 3 - q) * in(h - 1, q, 2 * (h - 2))) +
          2 * b * in(h, q, 2 * h - 2) + std::pow(1 - p, 2 * h - 1) * in(2 * h, q, 2 * h);
    } else {
      v = a * ((q + 1) * in(0, q, h - 2) + (2 * h - 3 - q) * in(h - 1, q, 2 * (h - 2)) +
               in(h - 1, q, 2 * h - 3)) +
          b * (2 * in(h + 1, q, 2 * h - 1) + in(h, q, h)) +
          std::pow(1 - p, 2 * h) * in(2 * h + 1, q, 2 * h + 1);
    }
    if (q == 0) v += p;
    out.probs[q] = v;
  }
  return out;
}

OutcomeDist outcome_dist(int n, const GateNoise &noise) {
  return noise.compilation == Compilation::kFlat ? flat_dist(n, noise) : cascade_dist(n, noise);
}

std::pair<OutcomeDist, OutcomeDist> general_t_pair(int n, OutcomeDist t0, OutcomeDist t1) {
  if (n < 1) {
    throw std::invalid_argument("need at least one qubit");
  }
  if (t0.n_qubits != n || t1.n_qubits != n) {
    throw std::invalid_argument("outcome distributions must describe " + std::to_string(n) +
                                " qubits");
  }
  t0.validate();
  t1.validate();
  return {std::move(t0), std::move(t1)};
}

}  // namespace readout
