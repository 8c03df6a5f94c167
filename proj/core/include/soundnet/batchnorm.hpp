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

#ifndef SOUNDNET_BATCHNORM_HPP_
#define SOUNDNET_BATCHNORM_HPP_

#include <cstdint>
#include <vector>

#include "soundnet/tensor.hpp"

namespace soundnet {

// Per-channel batch normalization state. Normalization uses the biased
// variance; running statistics blend as
//   running <- (1 - momentum) * running + momentum * batch_stat.
struct BatchNormParams {
  std::vector<Real> gamma;
  std::vector<Real> beta;
  std::vector<Real> running_mean;
  std::vector<Real> running_var;
  Real epsilon = 1e-5;
  Real momentum = 0.1;
  // Running stats start at (0, 1) but are not meaningful until the first
  // train-mode forward has blended real batch statistics into them.
  bool running_initialized = false;

  std::int64_t channels() const { return static_cast<std::int64_t>(gamma.size()); }
  void validate() const;
};

enum class BatchNormMode { kTrain, kEval };

// Everything the backward pass and the running-stat update need from one
// train-mode forward.
struct BatchNormCache {
  std::vector<Real> batch_mean;
  std::vector<Real> batch_var;   // biased
  std::vector<Real> inv_std;     // 1 / sqrt(var + eps)
  BatchNormMode mode = BatchNormMode::kTrain;
};

// Train mode normalizes per channel over (batch, length); eval mode uses
// running stats and requires them to be initialized. The caller applies
// running-stat updates via bn_update_running (forward itself is pure).
Tensor3 batchnorm_forward(const Tensor3& input, const BatchNormParams& params,
                          BatchNormMode mode, BatchNormCache* cache);

// Blends the cached batch statistics into params' running stats.
void bn_update_running(BatchNormParams& params, const BatchNormCache& cache);

struct BatchNormGrads {
  std::vector<Real> gamma;
  std::vector<Real> beta;
};

Tensor3 batchnorm_backward(const Tensor3& input, const BatchNormParams& params,
                           const BatchNormCache& cache, const Tensor3& grad_out,
                           BatchNormGrads* grads);

}  // namespace soundnet

#endif  // SOUNDNET_BATCHNORM_HPP_
