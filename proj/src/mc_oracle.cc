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

#include "readout/mc_oracle.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

namespace readout {

namespace {

constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

// Streams keep the two input states of one shot independent.
constexpr std::uint64_t kStreamGates = 1;
constexpr std::uint64_t kStreamPhotons = 2;
constexpr std::uint64_t kStreamDark = 3;
constexpr std::uint64_t kStreamBright = 4;

// Splits [0, shots) into contiguous blocks, one histogram per worker.
template <typename ShotFn>
Histogram run_shots(std::uint64_t shots, ShotFn &&one_shot) {
  const unsigned workers =
      static_cast<unsigned>(std::min<std::uint64_t>(mc_worker_count(), std::max<std::uint64_t>(shots / 4096, 1)));
  std::vector<Histogram> partial(workers);
  auto body = [&](unsigned w) {
    const std::uint64_t begin = shots * w / workers;
    const std::uint64_t end = shots * (w + 1) / workers;
    for (std::uint64_t s = begin; s < end; ++s) partial[w].add(one_shot(s));
  };
  if (workers == 1) {
    body(0);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(body, w);
  }
  for (unsigned w = 1; w < workers; ++w) partial[0].merge(partial[w]);
  return std::move(partial[0]);
}

// Cumulative table for inversion sampling from a stored law.
struct InverseCdf {
  std::size_t offset = 0;
  std::vector<double> cdf;

  explicit InverseCdf(const DiscreteDist &d) : offset(d.offset()) {
    double run = 0;
    for (double m : d.masses()) cdf.push_back(run += m);
  }
  InverseCdf(const std::vector<double> &probs) {
    double run = 0;
    for (double m : probs) cdf.push_back(run += m);
  }
  std::size_t draw(ShotRng &rng) const {
    // Scale by the stored total so truncated laws still cover (0, 1).
    const double u = rng.uniform() * cdf.back();
    const auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
    const auto i = static_cast<std::size_t>(std::min<std::ptrdiff_t>(
        it - cdf.begin(), static_cast<std::ptrdiff_t>(cdf.size()) - 1));
    return offset + i;
  }
};

// Poisson mean contributed by one bright qubit over t ms.
double bright_mean(const RateParams &r, double t, ShotRng &rng) {
  const double tau = rng.exponential(r.lambda);
  if (tau >= t) return r.mu1 * t;
  return r.mu1 * tau + r.mu0 * (t - tau);
}

}  // namespace

ShotRng::ShotRng(std::uint64_t seed, std::uint64_t stream, std::uint64_t shot) {
  std::uint64_t sm = mix64(mix64(mix64(seed) ^ (stream * kGamma)) + shot);
  for (auto &w : s_) {
    sm += kGamma;
    w = mix64(sm);
  }
}

std::uint64_t ShotRng::next() {
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double ShotRng::uniform() {
  return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
}

bool ShotRng::bernoulli(double p) { return uniform() < p; }

double ShotRng::exponential(double rate) {
  if (rate == 0) return std::numeric_limits<double>::infinity();
  return -std::log(uniform()) / rate;
}

std::uint64_t ShotRng::poisson(double mean) {
  if (mean <= 0) return 0;
  if (mean < 30) {
    const double u = uniform();
    double p = std::exp(-mean);
    double cdf = p;
    std::uint64_t k = 0;
    // The cap only matters when rounding leaves cdf just short of u.
    const double cap = mean + 40 * std::sqrt(mean) + 100;
    while (u > cdf && k < cap) {
      ++k;
      p *= mean / static_cast<double>(k);
      cdf += p;
    }
    return k;
  }
  // Hormann's PTRS.
  const double slam = std::sqrt(mean);
  const double b = 0.931 + 2.53 * slam;
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double vr = 0.9277 - 3.6224 / (b - 2);
  for (;;) {
    const double u = uniform() - 0.5;
    const double v = uniform();
    const double us = 0.5 - std::abs(u);
    const double k = std::floor((2 * a / us + b) * u + mean + 0.43);
    if (us >= 0.07 && v <= vr) return static_cast<std::uint64_t>(k);
    if (k < 0 || (us < 0.013 && v > us)) continue;
    const double lhs = std::log(v * inv_alpha / (a / (us * us) + b));
    if (lhs <= log_poisson_pmf(static_cast<std::size_t>(k), mean)) {
      return static_cast<std::uint64_t>(k);
    }
  }
}

void Histogram::add(std::size_t k) {
  if (k >= counts.size()) counts.resize(k + 1, 0);
  ++counts[k];
  ++shots;
}

void Histogram::merge(const Histogram &other) {
  if (other.counts.size() > counts.size()) counts.resize(other.counts.size(), 0);
  for (std::size_t k = 0; k < other.counts.size(); ++k) counts[k] += other.counts[k];
  shots += other.shots;
}

DiscreteDist Histogram::to_dist() const {
  if (shots == 0) {
    throw std::logic_error("empty histogram");
  }
  std::size_t lo = 0;
  while (counts[lo] == 0) ++lo;
  std::vector<double> masses(counts.size() - lo);
  for (std::size_t k = lo; k < counts.size(); ++k) {
    masses[k - lo] = static_cast<double>(counts[k]) / static_cast<double>(shots);
  }
  return DiscreteDist(lo, std::move(masses));
}

unsigned mc_worker_count() { return std::max(1u, std::thread::hardware_concurrency()); }

OutcomeDist sample_gate_outcomes(const GateWiring &wiring, double p, std::uint64_t shots,
                                 std::uint64_t seed) {
  wiring.validate();
  if (!(p >= 0 && p <= 1)) {
    throw std::domain_error("gate failure probability must lie in [0, 1]");
  }
  if (shots == 0) {
    throw std::invalid_argument("need at least one shot");
  }
  const std::size_t n_gates = wiring.gates.size();
  const Histogram h = run_shots(shots, [&](std::uint64_t shot) -> std::size_t {
    ShotRng rng(seed, kStreamGates, shot);
    std::uint64_t failures = 0;
    for (std::size_t g = 0; g < n_gates; ++g) {
      if (rng.bernoulli(p)) failures |= std::uint64_t{1} << g;
    }
    return static_cast<std::size_t>(std::popcount(propagate(wiring, failures)));
  });
  OutcomeDist out{wiring.n_qubits, std::vector<double>(wiring.n_qubits + 1, 0.0)};
  for (std::size_t q = 0; q < h.counts.size(); ++q) {
    out.probs[q] = static_cast<double>(h.counts[q]) / static_cast<double>(h.shots);
  }
  return out;
}

Histogram sample_photon_counts(const RateParams &rates, int initial_state, double t,
                               std::uint64_t shots, std::uint64_t seed) {
  rates.validate();
  if (initial_state != 0 && initial_state != 1) {
    throw std::invalid_argument("initial state must be 0 or 1");
  }
  if (!std::isfinite(t) || t < 0) {
    throw std::domain_error("duration must be finite and non-negative");
  }
  if (shots == 0) {
    throw std::invalid_argument("need at least one shot");
  }
  return run_shots(shots, [&](std::uint64_t shot) -> std::size_t {
    ShotRng rng(seed, kStreamPhotons, shot);
    const double mean = initial_state == 0 ? rates.mu0 * t : bright_mean(rates, t, rng);
    return rng.poisson(mean);
  });
}

void McConfig::validate() const {
  if (shots < 1) {
    throw std::invalid_argument("need at least one shot");
  }
  scheme.validate();
  if (!std::isfinite(t) || t < 0) {
    throw std::domain_error("duration must be finite and non-negative");
  }
}

SchemeSamples sample_full_scheme(const McConfig &config) {
  config.validate();
  const SchemeConfig &sc = config.scheme;
  const int n = sc.n_qubits;
  const double t = config.t;
  const RateParams &r = sc.rates;
  SchemeSamples out;

  switch (sc.model) {
    case ReadoutModel::kIdealPoisson:
      for (int j = 0; j < 2; ++j) {
        const double mean = n * (j == 0 ? r.mu0 : r.mu1) * t;
        (j == 0 ? out.h0 : out.h1) = run_shots(config.shots, [&](std::uint64_t shot) {
          ShotRng rng(config.seed, j == 0 ? kStreamDark : kStreamBright, shot);
          return static_cast<std::size_t>(rng.poisson(mean));
        });
      }
      break;

    case ReadoutModel::kNoisyDecaying: {
      // Input |0>: the gates leave |0...0> alone.
      out.h0 = run_shots(config.shots, [&](std::uint64_t shot) {
        ShotRng rng(config.seed, kStreamDark, shot);
        return static_cast<std::size_t>(rng.poisson(n * r.mu0 * t));
      });
      const GateWiring wiring = wiring_for(sc.noise.compilation, n);
      const double p = sc.noise.p;
      out.h1 = run_shots(config.shots, [&](std::uint64_t shot) {
        ShotRng rng(config.seed, kStreamBright, shot);
        std::uint64_t failures = 0;
        for (std::size_t g = 0; g < wiring.gates.size(); ++g) {
          if (rng.bernoulli(p)) failures |= std::uint64_t{1} << g;
        }
        const int q = std::popcount(propagate(wiring, failures));
        // Independent Poisson counts add, so one draw at the summed mean
        // has the law of the per-qubit sum.
        double mean = (n - q) * r.mu0 * t;
        for (int i = 0; i < q; ++i) mean += bright_mean(r, t, rng);
        return static_cast<std::size_t>(rng.poisson(mean));
      });
      break;
    }

    case ReadoutModel::kGeneralInjected: {
      const SingleQubitLaws laws = sc.injected->laws(t);
      const InverseCdf dark(laws.dark);
      const InverseCdf bright(laws.bright);
      for (int j = 0; j < 2; ++j) {
        const InverseCdf gates(j == 0 ? sc.injected->t0.probs : sc.injected->t1.probs);
        const InverseCdf &same = j == 0 ? dark : bright;
        const InverseCdf &other = j == 0 ? bright : dark;
        (j == 0 ? out.h0 : out.h1) = run_shots(config.shots, [&](std::uint64_t shot) {
          ShotRng rng(config.seed, j == 0 ? kStreamDark : kStreamBright, shot);
          const auto q = static_cast<int>(gates.draw(rng));
          std::size_t k = 0;
          for (int i = 0; i < n; ++i) k += (i < q ? same : other).draw(rng);
          return k;
        });
      }
      break;
    }
  }
  return out;
}

}  // namespace readout
