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

#ifndef SOUNDNET_NETWORK_HPP_
#define SOUNDNET_NETWORK_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "soundnet/batchnorm.hpp"
#include "soundnet/conv.hpp"
#include "soundnet/pool.hpp"
#include "soundnet/tensor.hpp"

namespace soundnet {

enum class LayerKind { kConv, kTransposedConv, kMaxPool, kBatchNorm, kRelu };

// Layer geometry in natural orientation: in_channels is what the layer
// consumes, out_channels what it produces (also for transposed layers).
struct ConvGeometry {
  std::int64_t in_channels = 0;
  std::int64_t out_channels = 0;
  std::int64_t kernel_size = 0;
  std::int64_t stride = 1;
  std::int64_t padding = 0;
};

struct PoolGeometry {
  std::int64_t pool_size = 0;
  std::int64_t stride = 0;
};

struct LayerSpec {
  std::string name;
  LayerKind kind = LayerKind::kConv;
  ConvGeometry conv;   // kConv / kTransposedConv
  PoolGeometry pool;   // kMaxPool
  std::int64_t channels = 0;  // kBatchNorm
};

// An ordered layer stack plus the set of names whose activations are
// exposed. Taps address blocks: a conv/pool layer together with any
// batchnorm/relu layers that immediately follow it, so "conv5" means the
// post-activation value, matching how the layer sweep is usually read.
struct NetworkConfig {
  std::string id;  // soundnet8 | soundnet5 | autoencoder4 | custom
  std::int64_t input_channels = 1;
  std::vector<LayerSpec> layers;
  std::vector<std::string> taps;

  // Unique names, channel chaining, per-kind geometry sanity.
  void validate() const;
  std::int64_t output_channels() const;
};

// Object classes come first in the 1401-channel output, scenes after.
struct HeadSplit {
  std::int64_t object_classes = 1000;
  std::int64_t scene_classes = 401;
  std::int64_t total() const { return object_classes + scene_classes; }
};

// Splits a (B, 1401, T) output into (B, 1000, T) object and (B, 401, T)
// scene logits.
std::pair<Tensor3, Tensor3> split_heads(const Tensor3& output, const HeadSplit& split);

// --- Architectures -------------------------------------------------------

// 8 convolutions with max-pools after the first, second and fifth;
// batchnorm + ReLU after every convolution except the 1401-channel output.
NetworkConfig build_soundnet8();

// The shallower 5-convolution variant with three pools.
NetworkConfig build_soundnet5();

inline constexpr std::int64_t kSoundNetOutputChannels = 1401;

// 4 encoder layers (the first four soundnet8 convolutions with their pools)
// and 4 fractionally strided decoder layers mirroring them. Output length
// equals input length exactly when the input length is a multiple of
// kAutoencoderLengthMultiple. width_schedule scales the channel widths;
// default matches the 8-layer network's first four stages.
NetworkConfig build_autoencoder4(
    const std::vector<std::int64_t>& width_schedule = {16, 32, 64, 128});

inline constexpr std::int64_t kAutoencoderLengthMultiple = 1024;

// --- Custom architectures ------------------------------------------------

// Text form, one layer per line (or ';'-separated), '#' comments:
//   conv name=conv1 out=16 kernel=64 stride=2 pad=32 bn relu
//   pool name=pool1 size=8 stride=8
//   tconv name=dconv1 out=1 kernel=64 stride=16 pad=24
// Input channels chain automatically from 1; `bn`/`relu` append the
// corresponding layers to the block.
NetworkConfig parse_arch(const std::string& text);

// Canonical ';'-separated single-line form; parse_arch round-trips it.
std::string serialize_arch(const NetworkConfig& config);

// "soundnet8", "soundnet5", "autoencoder4" or "custom:<arch text>".
NetworkConfig network_for_id(const std::string& id);
std::string network_id(const NetworkConfig& config);

// --- Parameters ----------------------------------------------------------

struct Parameters {
  std::uint64_t seed = 0;
  std::map<std::string, ConvParams> conv;       // conv and transposed layers
  std::map<std::string, BatchNormParams> bn;
};

inline constexpr Real kInitStdDev = 0.01;

// Conv weights drawn from N(0, weight_std^2) with the given seed, biases
// zero, batchnorm gamma 1 / beta 0 with unset running stats. Deterministic
// for a fixed seed. Training uses the default 0.01; gradient checks pass a
// larger spread so activations are not vanishingly small.
Parameters init_params(const NetworkConfig& config, std::uint64_t seed,
                       Real weight_std = kInitStdDev);

// Checks every conv/batchnorm layer has a parameter entry of the right shape.
void validate_params(const NetworkConfig& config, const Parameters& params);

// Total number of stored parameter scalars (conv weights and biases,
// batchnorm gamma/beta/running mean/running var).
std::int64_t parameter_count(const NetworkConfig& config);

// --- Shape law -----------------------------------------------------------

// Per-block output length for the given input length, in execution order,
// without touching any parameter values. Throws if some layer underflows.
std::vector<std::pair<std::string, std::int64_t>> layer_output_lengths(
    const NetworkConfig& config, std::int64_t input_length);

// Smallest input length for which every layer up to `up_to` (a tap name;
// empty = the whole network) produces output length >= 1.
std::int64_t minimum_input_length(const NetworkConfig& config,
                                  const std::string& up_to = "");

// --- Execution -----------------------------------------------------------

struct ForwardOptions {
  BatchNormMode mode = BatchNormMode::kEval;
  // Stop once the block with this tap name completes; empty runs everything.
  std::string stop_after;
  // Keep per-layer tensors so backward() can run.
  bool want_trace = false;
};

struct ForwardTrace {
  // Output of every executed layer, parallel with config.layers.
  std::vector<Tensor3> outputs;
  std::vector<std::vector<std::int64_t>> pool_argmax;
  std::vector<BatchNormCache> bn_caches;
  std::size_t layers_run = 0;
};

struct ForwardResult {
  // Tap name -> block output, for taps reached during this run.
  std::map<std::string, Tensor3> activations;
  // Output of the last block executed.
  Tensor3 output;
  // (layer name, cache) pairs for train-mode batchnorm stat updates.
  std::vector<std::pair<std::string, BatchNormCache>> bn_updates;
  ForwardTrace trace;  // populated when want_trace
};

// Variable-length forward pass. Rejects non-finite input and inputs
// shorter than minimum_input_length (naming the minimum in the error).
ForwardResult forward(const NetworkConfig& config, const Parameters& params,
                      const Tensor3& input, const ForwardOptions& options);

// Blends all train-mode batchnorm statistics from `result` into params.
void apply_running_updates(Parameters& params, const ForwardResult& result);

struct ParamGrads {
  std::map<std::string, ConvGrads> conv;
  std::map<std::string, BatchNormGrads> bn;
};

// Backpropagates grad_output through the layers recorded in the trace.
// Returns the gradient with respect to the network input.
Tensor3 backward(const NetworkConfig& config, const Parameters& params,
                 const Tensor3& input, const ForwardTrace& trace,
                 const Tensor3& grad_output, ParamGrads* grads);

}  // namespace soundnet

#endif  // SOUNDNET_NETWORK_HPP_
