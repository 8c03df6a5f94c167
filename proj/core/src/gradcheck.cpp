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

#include "soundnet/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "soundnet/error.hpp"

namespace soundnet {

namespace {

Real rel_error(Real analytic, Real numeric) {
  const Real denom = std::max({std::abs(analytic), std::abs(numeric), Real(1e-3)});
  return std::abs(analytic - numeric) / denom;
}

std::vector<std::size_t> sample_indices(std::size_t size, std::int64_t want,
                                        std::mt19937_64& rng) {
  std::vector<std::size_t> all(size);
  std::iota(all.begin(), all.end(), std::size_t{0});
  if (static_cast<std::size_t>(want) >= size) return all;
  std::shuffle(all.begin(), all.end(), rng);
  all.resize(static_cast<std::size_t>(want));
  std::sort(all.begin(), all.end());
  return all;
}

}  // namespace

GradCheckReport gradient_check(const NetworkConfig& config, const Parameters& params,
                               const Tensor3& input, const GradCheckOptions& options) {
  if (!(options.step > 0)) throw Error("gradient_check: step must be > 0");

  ForwardOptions fopts;
  fopts.mode = options.mode;
  fopts.want_trace = true;
  const ForwardResult base = forward(config, params, input, fopts);

  std::mt19937_64 rng(options.seed);
  std::normal_distribution<Real> gauss(0.0, 1.0);
  Tensor3 projection(base.output.batch, base.output.channels, base.output.length);
  // Normalizing by the output size keeps the scalar loss O(activation
  // scale) regardless of network width, so finite-difference round-off on
  // exactly-zero gradients (e.g. a conv bias swallowed by batchnorm's mean
  // subtraction) stays far below the relative-error floor.
  const Real norm = Real(1) / std::sqrt(static_cast<Real>(projection.values.size()));
  for (Real& r : projection.values) r = gauss(rng) * norm;

  auto loss_at = [&](const Parameters& p, const Tensor3& x) {
    ForwardOptions eopts;
    eopts.mode = options.mode;
    const ForwardResult fwd = forward(config, p, x, eopts);
    Real acc = 0;
    for (std::size_t i = 0; i < projection.values.size(); ++i) {
      acc += projection.values[i] * fwd.output.values[i];
    }
    return acc;
  };

  ParamGrads grads;
  const Tensor3 input_grad =
      backward(config, params, input, base.trace, projection, &grads);

  GradCheckReport report;
  report.tolerance = options.tolerance;

  Parameters work = params;  // perturbed in place, entry by entry
  auto check_span = [&](const std::string& block, std::vector<Real>& values,
                        const std::vector<Real>& analytic) {
    GradCheckEntry entry;
    entry.block = block;
    for (const std::size_t i : sample_indices(values.size(), options.samples_per_block, rng)) {
      const Real saved = values[i];
      values[i] = saved + options.step;
      const Real up = loss_at(work, input);
      values[i] = saved - options.step;
      const Real down = loss_at(work, input);
      values[i] = saved;
      const Real numeric = (up - down) / (2 * options.step);
      entry.max_rel_error = std::max(entry.max_rel_error, rel_error(analytic[i], numeric));
      entry.checked += 1;
    }
    report.entries.push_back(entry);
    report.max_rel_error = std::max(report.max_rel_error, entry.max_rel_error);
  };

  for (const LayerSpec& layer : config.layers) {
    if (layer.kind == LayerKind::kConv || layer.kind == LayerKind::kTransposedConv) {
      ConvParams& p = work.conv.at(layer.name);
      const ConvGrads& g = grads.conv.at(layer.name);
      check_span(layer.name + ".weight", p.weights, g.weights);
      check_span(layer.name + ".bias", p.bias, g.bias);
    } else if (layer.kind == LayerKind::kBatchNorm) {
      BatchNormParams& p = work.bn.at(layer.name);
      const BatchNormGrads& g = grads.bn.at(layer.name);
      check_span(layer.name + ".gamma", p.gamma, g.gamma);
      check_span(layer.name + ".beta", p.beta, g.beta);
    }
  }

  {
    GradCheckEntry entry;
    entry.block = "input";
    Tensor3 probe = input;
    for (const std::size_t i :
         sample_indices(probe.values.size(), options.samples_per_block, rng)) {
      const Real saved = probe.values[i];
      probe.values[i] = saved + options.step;
      const Real up = loss_at(params, probe);
      probe.values[i] = saved - options.step;
      const Real down = loss_at(params, probe);
      probe.values[i] = saved;
      const Real numeric = (up - down) / (2 * options.step);
      entry.max_rel_error =
          std::max(entry.max_rel_error, rel_error(input_grad.values[i], numeric));
      entry.checked += 1;
    }
    report.entries.push_back(entry);
    report.max_rel_error = std::max(report.max_rel_error, entry.max_rel_error);
  }

  report.pass = report.max_rel_error <= options.tolerance;
  return report;
}

}  // namespace soundnet
