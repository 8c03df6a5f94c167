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

#include "soundnet/batchnorm.hpp"

#include <cmath>
#include <string>

namespace soundnet {

void BatchNormParams::validate() const {
  const std::size_t c = gamma.size();
  if (beta.size() != c || running_mean.size() != c || running_var.size() != c) {
    throw ShapeError("batchnorm: parameter arrays disagree on channel count (gamma=" +
                     std::to_string(gamma.size()) + " beta=" + std::to_string(beta.size()) +
                     " running_mean=" + std::to_string(running_mean.size()) +
                     " running_var=" + std::to_string(running_var.size()) + ")");
  }
  if (epsilon <= 0) {
    throw ShapeError("batchnorm: epsilon must be > 0");
  }
  for (Real v : running_var) {
    if (v < 0) throw ShapeError("batchnorm: negative running variance");
  }
}

Tensor3 batchnorm_forward(const Tensor3& input, const BatchNormParams& params,
                          BatchNormMode mode, BatchNormCache* cache) {
  params.validate();
  if (input.channels != params.channels()) {
    throw ShapeError("batchnorm_forward: input channels " + std::to_string(input.channels) +
                     " != param channels " + std::to_string(params.channels()));
  }
  const std::int64_t n = input.batch * input.length;  // normalization set per channel
  if (mode == BatchNormMode::kTrain && n < 2) {
    throw ShapeError("batchnorm_forward: train mode needs batch*length >= 2 per channel, got " +
                     std::to_string(n));
  }
  if (mode == BatchNormMode::kEval && !params.running_initialized) {
    throw Error("batchnorm_forward: eval mode with uninitialized running stats");
  }

  const std::int64_t channels = input.channels;
  std::vector<Real> mean(static_cast<std::size_t>(channels), Real(0));
  std::vector<Real> var(static_cast<std::size_t>(channels), Real(0));
  if (mode == BatchNormMode::kTrain) {
    for (std::int64_t c = 0; c < channels; ++c) {
      Real acc = 0;
      for (std::int64_t b = 0; b < input.batch; ++b) {
        const Real* row = input.row(b, c);
        for (std::int64_t t = 0; t < input.length; ++t) acc += row[t];
      }
      const Real mu = acc / static_cast<Real>(n);
      Real vacc = 0;
      for (std::int64_t b = 0; b < input.batch; ++b) {
        const Real* row = input.row(b, c);
        for (std::int64_t t = 0; t < input.length; ++t) {
          const Real d = row[t] - mu;
          vacc += d * d;
        }
      }
      mean[static_cast<std::size_t>(c)] = mu;
      var[static_cast<std::size_t>(c)] = vacc / static_cast<Real>(n);  // biased
    }
  } else {
    mean = params.running_mean;
    var = params.running_var;
  }

  Tensor3 out(input.batch, channels, input.length);
  std::vector<Real> inv_std(static_cast<std::size_t>(channels));
  for (std::int64_t c = 0; c < channels; ++c) {
    const std::size_t ci = static_cast<std::size_t>(c);
    inv_std[ci] = Real(1) / std::sqrt(var[ci] + params.epsilon);
    const Real g = params.gamma[ci] * inv_std[ci];
    const Real shift = params.beta[ci] - g * mean[ci];
    for (std::int64_t b = 0; b < input.batch; ++b) {
      const Real* in_row = input.row(b, c);
      Real* out_row = out.row(b, c);
      for (std::int64_t t = 0; t < input.length; ++t) {
        out_row[t] = g * in_row[t] + shift;
      }
    }
  }

  if (cache != nullptr) {
    cache->batch_mean = std::move(mean);
    cache->batch_var = std::move(var);
    cache->inv_std = std::move(inv_std);
    cache->mode = mode;
  }
  return out;
}

void bn_update_running(BatchNormParams& params, const BatchNormCache& cache) {
  if (cache.mode != BatchNormMode::kTrain) return;
  const std::size_t c = params.gamma.size();
  for (std::size_t i = 0; i < c; ++i) {
    params.running_mean[i] = (Real(1) - params.momentum) * params.running_mean[i] +
                             params.momentum * cache.batch_mean[i];
    params.running_var[i] = (Real(1) - params.momentum) * params.running_var[i] +
                            params.momentum * cache.batch_var[i];
  }
  params.running_initialized = true;
}

Tensor3 batchnorm_backward(const Tensor3& input, const BatchNormParams& params,
                           const BatchNormCache& cache, const Tensor3& grad_out,
                           BatchNormGrads* grads) {
  check_same_shape(input, grad_out, "batchnorm_backward");
  const std::int64_t channels = input.channels;
  const Real n = static_cast<Real>(input.batch * input.length);

  Tensor3 grad_in(input.batch, channels, input.length);
  if (grads != nullptr) {
    grads->gamma.assign(static_cast<std::size_t>(channels), Real(0));
    grads->beta.assign(static_cast<std::size_t>(channels), Real(0));
  }

  for (std::int64_t c = 0; c < channels; ++c) {
    const std::size_t ci = static_cast<std::size_t>(c);
    const Real mu = cache.batch_mean[ci];
    const Real istd = cache.inv_std[ci];
    Real sum_dy = 0;
    Real sum_dy_xhat = 0;
    for (std::int64_t b = 0; b < input.batch; ++b) {
      const Real* in_row = input.row(b, c);
      const Real* gout_row = grad_out.row(b, c);
      for (std::int64_t t = 0; t < input.length; ++t) {
        const Real xhat = (in_row[t] - mu) * istd;
        sum_dy += gout_row[t];
        sum_dy_xhat += gout_row[t] * xhat;
      }
    }
    if (grads != nullptr) {
      grads->beta[ci] = sum_dy;
      grads->gamma[ci] = sum_dy_xhat;
    }

    const Real g_istd = params.gamma[ci] * istd;
    if (cache.mode == BatchNormMode::kTrain) {
      const Real mean_dy = sum_dy / n;
      const Real mean_dy_xhat = sum_dy_xhat / n;
      for (std::int64_t b = 0; b < input.batch; ++b) {
        const Real* in_row = input.row(b, c);
        const Real* gout_row = grad_out.row(b, c);
        Real* gin_row = grad_in.row(b, c);
        for (std::int64_t t = 0; t < input.length; ++t) {
          const Real xhat = (in_row[t] - mu) * istd;
          gin_row[t] = g_istd * (gout_row[t] - mean_dy - xhat * mean_dy_xhat);
        }
      }
    } else {
      // Eval statistics are constants, so the map is affine per element.
      for (std::int64_t b = 0; b < input.batch; ++b) {
        const Real* gout_row = grad_out.row(b, c);
        Real* gin_row = grad_in.row(b, c);
        for (std::int64_t t = 0; t < input.length; ++t) {
          gin_row[t] = g_istd * gout_row[t];
        }
      }
    }
  }
  return grad_in;
}

}  // namespace soundnet
