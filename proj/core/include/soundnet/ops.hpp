// Copyright 2026 The soundnet-cpp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SOUNDNET_OPS_HPP_
#define SOUNDNET_OPS_HPP_

#include <vector>

#include "soundnet/tensor.hpp"

namespace soundnet {

// Elementwise max(0, x).
Tensor3 relu_forward(const Tensor3& input);

// Gradient is passed through where input > 0 and zeroed elsewhere
// (including at exactly 0).
Tensor3 relu_backward(const Tensor3& input, const Tensor3& grad_out);

// Numerically stable softmax (max subtraction before exponentiation).
// Rejects empty input.
std::vector<Real> softmax(const std::vector<Real>& logits);

// Floor applied to Q entries before the log in kl_divergence, so that
// zero-probability student entries do not produce infinities.
inline constexpr Real kKlFloorEpsilon = 1e-8;

// D(P || Q) = sum_j P_j log(P_j / Q_j). Terms with P_j == 0 contribute 0;
// Q_j is floored at `q_floor` before the log. Lengths must match.
Real kl_divergence(const std::vector<Real>& p, const std::vector<Real>& q,
                   Real q_floor = kKlFloorEpsilon);

// Gradient of D(P || softmax(logits)) with respect to the logits, which is
// exactly softmax(logits) - P when P sums to 1.
std::vector<Real> kl_softmax_gradient(const std::vector<Real>& p,
                                      const std::vector<Real>& logits);

}  // namespace soundnet

#endif  // SOUNDNET_OPS_HPP_
