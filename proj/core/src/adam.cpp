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

#include "soundnet/adam.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "soundnet/error.hpp"

namespace soundnet {

namespace {

// (parameter span, gradient span) pairs in a fixed layer order, so the Adam
// moments line up with the same scalars on every step.
struct SpanPair {
  Real* param;
  const Real* grad;
  std::size_t size;
};

std::vector<SpanPair> trainable_spans(const NetworkConfig& config, Parameters& params,
                                      const ParamGrads& grads) {
  std::vector<SpanPair> spans;
  for (const LayerSpec& layer : config.layers) {
    switch (layer.kind) {
      case LayerKind::kConv:
      case LayerKind::kTransposedConv: {
        ConvParams& p = params.conv.at(layer.name);
        auto git = grads.conv.find(layer.name);
        if (git == grads.conv.end()) {
          throw Error("adam_step: no gradient for layer \"" + layer.name + "\"");
        }
        const ConvGrads& g = git->second;
        if (g.weights.size() != p.weights.size() || g.bias.size() != p.bias.size()) {
          throw ShapeError("adam_step: gradient size mismatch for layer \"" + layer.name +
                           "\"");
        }
        spans.push_back({p.weights.data(), g.weights.data(), p.weights.size()});
        spans.push_back({p.bias.data(), g.bias.data(), p.bias.size()});
        break;
      }
      case LayerKind::kBatchNorm: {
        BatchNormParams& p = params.bn.at(layer.name);
        auto git = grads.bn.find(layer.name);
        if (git == grads.bn.end()) {
          throw Error("adam_step: no gradient for layer \"" + layer.name + "\"");
        }
        const BatchNormGrads& g = git->second;
        if (g.gamma.size() != p.gamma.size() || g.beta.size() != p.beta.size()) {
          throw ShapeError("adam_step: gradient size mismatch for layer \"" + layer.name +
                           "\"");
        }
        spans.push_back({p.gamma.data(), g.gamma.data(), p.gamma.size()});
        spans.push_back({p.beta.data(), g.beta.data(), p.beta.size()});
        break;
      }
      default:
        break;
    }
  }
  return spans;
}

}  // namespace

std::int64_t trainable_count(const NetworkConfig& config) {
  std::int64_t total = 0;
  for (const LayerSpec& layer : config.layers) {
    switch (layer.kind) {
      case LayerKind::kConv:
      case LayerKind::kTransposedConv:
        total += layer.conv.in_channels * layer.conv.out_channels * layer.conv.kernel_size;
        total += layer.conv.out_channels;  // bias
        break;
      case LayerKind::kBatchNorm:
        total += 2 * layer.channels;  // gamma, beta
        break;
      default:
        break;
    }
  }
  return total;
}

void adam_step(const NetworkConfig& config, Parameters& params, const ParamGrads& grads,
               const AdamConfig& adam, AdamState& state) {
  const std::vector<SpanPair> spans = trainable_spans(config, params, grads);
  std::size_t total = 0;
  for (const SpanPair& s : spans) total += s.size;
  if (state.m.empty() && state.v.empty() && state.step == 0) {
    state.m.assign(total, Real(0));
    state.v.assign(total, Real(0));
  }
  if (state.m.size() != total || state.v.size() != total) {
    throw ShapeError("adam_step: state holds " + std::to_string(state.m.size()) +
                     " moments but the network has " + std::to_string(total) +
                     " trainable parameters");
  }

  state.step += 1;
  const Real t = static_cast<Real>(state.step);
  // Bias correction: the raw moments are zero-initialized, so early steps
  // are rescaled by 1 / (1 - beta^t).
  const Real m_correction = Real(1) - std::pow(adam.beta1, t);
  const Real v_correction = Real(1) - std::pow(adam.beta2, t);

  std::size_t offset = 0;
  for (const SpanPair& s : spans) {
    for (std::size_t i = 0; i < s.size; ++i) {
      const Real g = s.grad[i];
      Real& m = state.m[offset + i];
      Real& v = state.v[offset + i];
      m = adam.beta1 * m + (Real(1) - adam.beta1) * g;
      v = adam.beta2 * v + (Real(1) - adam.beta2) * g * g;
      const Real m_hat = m / m_correction;
      const Real v_hat = v / v_correction;
      s.param[i] -= adam.learning_rate * m_hat / (std::sqrt(v_hat) + adam.epsilon);
    }
    offset += s.size;
  }
}

}  // namespace soundnet
