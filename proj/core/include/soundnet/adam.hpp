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

#ifndef SOUNDNET_ADAM_HPP_
#define SOUNDNET_ADAM_HPP_

#include <cstdint>
#include <vector>

#include "soundnet/network.hpp"
#include "soundnet/tensor.hpp"

namespace soundnet {

struct AdamConfig {
  Real learning_rate = 0.001;
  Real beta1 = 0.9;
  Real beta2 = 0.999;
  Real epsilon = 1e-8;
};

// First/second moment accumulators over the flattened trainable parameters
// (conv weights, conv biases, batchnorm gamma/beta, in layer order).
struct AdamState {
  std::int64_t step = 0;
  std::vector<Real> m;
  std::vector<Real> v;
};

// Number of trainable scalars (running stats excluded).
std::int64_t trainable_count(const NetworkConfig& config);

// One bias-corrected Adam update, in place. Sizes the state lazily on the
// first call; afterwards the state must match the network.
void adam_step(const NetworkConfig& config, Parameters& params, const ParamGrads& grads,
               const AdamConfig& adam, AdamState& state);

}  // namespace soundnet

#endif  // SOUNDNET_ADAM_HPP_
