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

#include "soundnet/ops.hpp"

#include <algorithm>
#include <cmath>

namespace soundnet {

Tensor3 relu_forward(const Tensor3& input) {
  Tensor3 out = input;
  for (Real& v : out.values) {
    if (v < Real(0)) v = Real(0);
  }
  return out;
}

Tensor3 relu_backward(const Tensor3& input, const Tensor3& grad_out) {
  check_same_shape(input, grad_out, "relu_backward");
  Tensor3 grad_in = grad_out;
  const std::size_t n = input.values.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (input.values[i] <= Real(0)) grad_in.values[i] = Real(0);
  }
  return grad_in;
}

std::vector<Real> softmax(const std::vector<Real>& logits) {
  if (logits.empty()) {
    throw ShapeError("softmax: empty input");
  }
  const Real max_logit = *std::max_element(logits.begin(), logits.end());
  std::vector<Real> out(logits.size());
  Real sum = 0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - max_logit);
    sum += out[i];
  }
  const Real inv = Real(1) / sum;
  for (Real& v : out) v *= inv;
  return out;
}

Real kl_divergence(const std::vector<Real>& p, const std::vector<Real>& q,
                   Real q_floor) {
  if (p.size() != q.size()) {
    throw ShapeError("kl_divergence: length mismatch " +
                     std::to_string(p.size()) + " vs " +
                     std::to_string(q.size()));
  }
  Real kl = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= Real(0)) continue;
    const Real qf = std::max(q[i], q_floor);
    kl += p[i] * std::log(p[i] / qf);
  }
  return kl;
}

std::vector<Real> kl_softmax_gradient(const std::vector<Real>& p,
                                      const std::vector<Real>& logits) {
  if (p.size() != logits.size()) {
    throw ShapeError("kl_softmax_gradient: length mismatch " +
                     std::to_string(p.size()) + " vs " +
                     std::to_string(logits.size()));
  }
  std::vector<Real> grad = softmax(logits);
  for (std::size_t i = 0; i < p.size(); ++i) {
    grad[i] -= p[i];
  }
  return grad;
}

}  // namespace soundnet
