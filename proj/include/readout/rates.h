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

#ifndef READOUT_RATES_H
#define READOUT_RATES_H

namespace readout {

/// Fluorescence and decay rates, all in 1/ms.
struct RateParams {
  double mu0 = 3.5;      ///< dark-state (|0>) emission rate
  double mu1 = 14.0;     ///< bright-state (|1>) emission rate
  double lambda = 0.0041;  ///< |1> -> |0> decay rate

  /// Throws std::domain_error unless 0 <= mu0 <= mu1 and lambda >= 0, all finite.
  void validate() const;
};

}  // namespace readout

#endif  // READOUT_RATES_H
