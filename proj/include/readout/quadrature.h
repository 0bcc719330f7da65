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

#ifndef READOUT_QUADRATURE_H
#define READOUT_QUADRATURE_H

#include <vector>

namespace readout {

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Builds the n-point rule by Newton iteration on P_n. Cached per n.
const GaussLegendreRule &gauss_legendre(int n);

}  // namespace readout

#endif  // READOUT_QUADRATURE_H
