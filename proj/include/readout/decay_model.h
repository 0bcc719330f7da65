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

#ifndef READOUT_DECAY_MODEL_H
#define READOUT_DECAY_MODEL_H

#include "readout/dist.h"
#include "readout/rates.h"

namespace readout {

/// A bright qubit read out for `t` ms that may decay once to the dark state.
struct DecayModelParams {
  RateParams rates;
  double t = 0.0;  ///< ms

  /// Throws std::domain_error on non-finite or out-of-range values.
  void validate() const;
};

/// Knobs for the adaptive composite Gauss-Legendre rule over the decay time.
struct DecayQuadratureOptions {
  int order = 20;
  /// Multiplies the initial panel width (two standard deviations of the
  /// local Poisson mean). 0.5 halves every step.
  double panel_scale = 1.0;
  /// Per-count relative error target.
  double rel_tol = 1e-10;
  int max_depth = 30;
};

/// Photon-count law of a bright qubit that emits at mu1 until a single
/// exponential decay (rate lambda) and at mu0 afterwards:
///
///   W(k) = e^{-lambda t} L_{mu1 t}(k)
///        + int_0^t lambda e^{-lambda s} L_{mu1 s + mu0 (t - s)}(k) ds.
///
/// The integral shares one panel subdivision across all counts k.
DiscreteDist decaying_poisson(const DecayModelParams &params,
                              const DecayQuadratureOptions &options = {});

/// Mean and variance of W from its mixture-of-Poissons form: with Lambda the
/// random Poisson mean, mean = E[Lambda] and variance = E[Lambda] + Var[Lambda].
Moments decaying_poisson_moments(const DecayModelParams &params);

}  // namespace readout

#endif  // READOUT_DECAY_MODEL_H
