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

#include "soundnet/network.hpp"

#include <algorithm>
#include <cstddef>
#include <random>
#include <set>
#include <sstream>

#include "soundnet/error.hpp"
#include "soundnet/ops.hpp"

namespace soundnet {

namespace {

std::int64_t ceil_div(std::int64_t a, std::int64_t b) {
  return a >= 0 ? (a + b - 1) / b : a / b;
}

bool is_block_head(LayerKind kind) {
  return kind == LayerKind::kConv || kind == LayerKind::kTransposedConv ||
         kind == LayerKind::kMaxPool;
}

const char* kind_name(LayerKind kind) {
  switch (kind) {
    case LayerKind::kConv: return "conv";
    case LayerKind::kTransposedConv: return "tconv";
    case LayerKind::kMaxPool: return "pool";
    case LayerKind::kBatchNorm: return "batchnorm";
    case LayerKind::kRelu: return "relu";
  }
  return "?";
}

// Block structure: each conv/tconv/pool layer heads a block that extends
// through the batchnorm/relu layers following it.
struct BlockIndex {
  // For each layer, the index of its block's head layer.
  std::vector<std::size_t> head_of;
  // Head layer index -> index of the last layer in that block.
  std::map<std::size_t, std::size_t> end_of;
  std::map<std::string, std::size_t> head_by_name;
};

BlockIndex block_index(const NetworkConfig& config) {
  BlockIndex idx;
  idx.head_of.resize(config.layers.size());
  std::size_t head = 0;
  for (std::size_t i = 0; i < config.layers.size(); ++i) {
    if (is_block_head(config.layers[i].kind)) {
      head = i;
      idx.head_by_name[config.layers[i].name] = i;
    }
    idx.head_of[i] = head;
    idx.end_of[head] = i;
  }
  return idx;
}

std::string tap_list(const NetworkConfig& config) {
  std::string out;
  for (const std::string& tap : config.taps) {
    if (!out.empty()) out += ", ";
    out += tap;
  }
  return out;
}

// Layer index range [0, end] covering everything up to (and including) the
// block named `up_to`; the whole stack when `up_to` is empty.
std::size_t last_layer_for(const NetworkConfig& config, const std::string& up_to) {
  if (up_to.empty()) return config.layers.size() - 1;
  const BlockIndex idx = block_index(config);
  auto it = idx.head_by_name.find(up_to);
  if (it == idx.head_by_name.end()) {
    throw ConfigError("network " + config.id + ": unknown layer \"" + up_to +
                      "\"; valid taps: " + tap_list(config));
  }
  return idx.end_of.at(it->second);
}

// ConvParams stores transposed layers in adjoint orientation: out_channels
// is what the layer consumes, in_channels what it produces.
ConvParams conv_params_shell(const LayerSpec& layer) {
  ConvParams p;
  if (layer.kind == LayerKind::kTransposedConv) {
    p.out_channels = layer.conv.in_channels;
    p.in_channels = layer.conv.out_channels;
  } else {
    p.out_channels = layer.conv.out_channels;
    p.in_channels = layer.conv.in_channels;
  }
  p.kernel_size = layer.conv.kernel_size;
  p.stride = layer.conv.stride;
  p.padding = layer.conv.padding;
  return p;
}

std::int64_t conv_bias_length(const LayerSpec& layer) {
  // Bias is always per produced channel.
  return layer.conv.out_channels;
}

}  // namespace

void NetworkConfig::validate() const {
  if (layers.empty()) throw Error("network " + id + ": no layers");
  if (input_channels < 1) throw Error("network " + id + ": input_channels must be >= 1");
  std::set<std::string> names;
  std::int64_t current = input_channels;
  bool seen_head = false;
  for (const LayerSpec& layer : layers) {
    const std::string where = "network " + id + ", layer \"" + layer.name + "\"";
    if (layer.name.empty()) throw Error("network " + id + ": layer with empty name");
    if (layer.name.find_first_of(" \t;=#") != std::string::npos) {
      throw Error(where + ": name contains a reserved character");
    }
    if (!names.insert(layer.name).second) throw Error(where + ": duplicate name");
    switch (layer.kind) {
      case LayerKind::kConv:
      case LayerKind::kTransposedConv: {
        const ConvGeometry& g = layer.conv;
        if (g.in_channels < 1 || g.out_channels < 1 || g.kernel_size < 1 ||
            g.stride < 1 || g.padding < 0) {
          throw Error(where + ": bad geometry");
        }
        if (g.in_channels != current) {
          throw Error(where + ": expects " + std::to_string(g.in_channels) +
                      " input channels but gets " + std::to_string(current));
        }
        current = g.out_channels;
        seen_head = true;
        break;
      }
      case LayerKind::kMaxPool:
        if (layer.pool.pool_size < 1 || layer.pool.stride < 1) {
          throw Error(where + ": bad pool geometry");
        }
        seen_head = true;
        break;
      case LayerKind::kBatchNorm:
        if (!seen_head) throw Error(where + ": batchnorm before any block head");
        if (layer.channels != current) {
          throw Error(where + ": normalizes " + std::to_string(layer.channels) +
                      " channels but gets " + std::to_string(current));
        }
        break;
      case LayerKind::kRelu:
        if (!seen_head) throw Error(where + ": relu before any block head");
        break;
    }
  }
  const BlockIndex idx = block_index(*this);
  for (const std::string& tap : taps) {
    if (idx.head_by_name.find(tap) == idx.head_by_name.end()) {
      throw Error("network " + id + ": tap \"" + tap + "\" names no conv/pool layer");
    }
  }
}

std::int64_t NetworkConfig::output_channels() const {
  std::int64_t current = input_channels;
  for (const LayerSpec& layer : layers) {
    if (layer.kind == LayerKind::kConv || layer.kind == LayerKind::kTransposedConv) {
      current = layer.conv.out_channels;
    }
  }
  return current;
}

std::pair<Tensor3, Tensor3> split_heads(const Tensor3& output, const HeadSplit& split) {
  if (output.channels != split.total()) {
    throw ShapeError("split_heads: output has " + std::to_string(output.channels) +
                     " channels, expected " + std::to_string(split.total()));
  }
  Tensor3 object(output.batch, split.object_classes, output.length);
  Tensor3 scene(output.batch, split.scene_classes, output.length);
  for (std::int64_t b = 0; b < output.batch; ++b) {
    for (std::int64_t c = 0; c < split.object_classes; ++c) {
      std::copy_n(output.row(b, c), output.length, object.row(b, c));
    }
    for (std::int64_t c = 0; c < split.scene_classes; ++c) {
      std::copy_n(output.row(b, split.object_classes + c), output.length, scene.row(b, c));
    }
  }
  return {std::move(object), std::move(scene)};
}

// --- Architectures -------------------------------------------------------

namespace {

void append_conv(NetworkConfig& config, const std::string& name, std::int64_t out,
                 std::int64_t kernel, std::int64_t stride, std::int64_t padding,
                 bool bn, bool relu) {
  LayerSpec conv;
  conv.name = name;
  conv.kind = LayerKind::kConv;
  conv.conv.in_channels = config.layers.empty()
                              ? config.input_channels
                              : config.output_channels();
  conv.conv.out_channels = out;
  conv.conv.kernel_size = kernel;
  conv.conv.stride = stride;
  conv.conv.padding = padding;
  config.layers.push_back(conv);
  if (bn) {
    LayerSpec norm;
    norm.name = name + "_bn";
    norm.kind = LayerKind::kBatchNorm;
    norm.channels = out;
    config.layers.push_back(norm);
  }
  if (relu) {
    LayerSpec act;
    act.name = name + "_relu";
    act.kind = LayerKind::kRelu;
    config.layers.push_back(act);
  }
  config.taps.push_back(name);
}

void append_tconv(NetworkConfig& config, const std::string& name, std::int64_t out,
                  std::int64_t kernel, std::int64_t stride, std::int64_t padding,
                  bool bn, bool relu) {
  LayerSpec tc;
  tc.name = name;
  tc.kind = LayerKind::kTransposedConv;
  tc.conv.in_channels = config.output_channels();
  tc.conv.out_channels = out;
  tc.conv.kernel_size = kernel;
  tc.conv.stride = stride;
  tc.conv.padding = padding;
  config.layers.push_back(tc);
  if (bn) {
    LayerSpec norm;
    norm.name = name + "_bn";
    norm.kind = LayerKind::kBatchNorm;
    norm.channels = out;
    config.layers.push_back(norm);
  }
  if (relu) {
    LayerSpec act;
    act.name = name + "_relu";
    act.kind = LayerKind::kRelu;
    config.layers.push_back(act);
  }
  config.taps.push_back(name);
}

void append_pool(NetworkConfig& config, const std::string& name, std::int64_t size,
                 std::int64_t stride) {
  LayerSpec pool;
  pool.name = name;
  pool.kind = LayerKind::kMaxPool;
  pool.pool.pool_size = size;
  pool.pool.stride = stride;
  config.layers.push_back(pool);
  config.taps.push_back(name);
}

}  // namespace

NetworkConfig build_soundnet8() {
  NetworkConfig config;
  config.id = "soundnet8";
  append_conv(config, "conv1", 16, 64, 2, 32, true, true);
  append_pool(config, "pool1", 8, 8);
  append_conv(config, "conv2", 32, 32, 2, 16, true, true);
  append_pool(config, "pool2", 8, 8);
  append_conv(config, "conv3", 64, 16, 2, 8, true, true);
  append_conv(config, "conv4", 128, 8, 2, 4, true, true);
  append_conv(config, "conv5", 256, 4, 2, 2, true, true);
  append_pool(config, "pool5", 4, 4);
  append_conv(config, "conv6", 512, 4, 2, 2, true, true);
  append_conv(config, "conv7", 1024, 4, 2, 2, true, true);
  append_conv(config, "conv8", kSoundNetOutputChannels, 8, 2, 0, false, false);
  config.validate();
  return config;
}

NetworkConfig build_soundnet5() {
  NetworkConfig config;
  config.id = "soundnet5";
  append_conv(config, "conv1", 32, 64, 2, 32, true, true);
  append_pool(config, "pool1", 8, 8);
  append_conv(config, "conv2", 64, 32, 2, 16, true, true);
  append_pool(config, "pool2", 8, 8);
  append_conv(config, "conv3", 128, 16, 2, 8, true, true);
  append_pool(config, "pool3", 8, 8);
  append_conv(config, "conv4", 256, 8, 2, 4, true, true);
  append_conv(config, "conv5", kSoundNetOutputChannels, 16, 12, 4, false, false);
  config.validate();
  return config;
}

NetworkConfig build_autoencoder4(const std::vector<std::int64_t>& width_schedule) {
  if (width_schedule.size() != 4) {
    throw Error("autoencoder4: width_schedule needs 4 entries, got " +
                std::to_string(width_schedule.size()));
  }
  const std::int64_t w1 = width_schedule[0];
  const std::int64_t w2 = width_schedule[1];
  const std::int64_t w3 = width_schedule[2];
  const std::int64_t w4 = width_schedule[3];
  NetworkConfig config;
  config.id = "autoencoder4";
  append_conv(config, "conv1", w1, 64, 2, 32, true, true);
  append_pool(config, "pool1", 8, 8);
  append_conv(config, "conv2", w2, 32, 2, 16, true, true);
  append_pool(config, "pool2", 8, 8);
  append_conv(config, "conv3", w3, 16, 2, 8, true, true);
  append_conv(config, "conv4", w4, 8, 2, 4, true, true);
  // Each decoder stage inverts one encoder stage's length map exactly:
  // conv4/conv3 halve (k - 2p = 1 at stride 2), conv2+pool2 and
  // conv1+pool1 divide by 16 (k - 2p = 16 at stride 16).
  append_tconv(config, "dconv4", w3, 9, 2, 4, true, true);
  append_tconv(config, "dconv3", w2, 16, 2, 8, true, true);
  append_tconv(config, "dconv2", w1, 32, 16, 8, true, true);
  append_tconv(config, "dconv1", 1, 64, 16, 24, false, false);
  config.validate();
  return config;
}

// --- Custom architectures ------------------------------------------------

namespace {

std::int64_t parse_int_field(const std::string& line, const std::string& key,
                             const std::string& value) {
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("arch: bad integer for " + key + " in \"" + line + "\"");
  }
}

}  // namespace

NetworkConfig parse_arch(const std::string& text) {
  NetworkConfig config;
  config.id = "custom";
  std::string normalized = text;
  std::replace(normalized.begin(), normalized.end(), ';', '\n');
  std::istringstream lines(normalized);
  std::string line;
  while (std::getline(lines, line)) {
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream tokens(line);
    std::string kind;
    if (!(tokens >> kind)) continue;

    std::string name;
    std::map<std::string, std::int64_t> fields;
    bool bn = false;
    bool relu = false;
    std::string token;
    while (tokens >> token) {
      if (token == "bn") {
        bn = true;
      } else if (token == "relu") {
        relu = true;
      } else {
        const std::size_t eq = token.find('=');
        if (eq == std::string::npos) {
          throw ConfigError("arch: unexpected token \"" + token + "\" in \"" + line + "\"");
        }
        const std::string key = token.substr(0, eq);
        const std::string value = token.substr(eq + 1);
        if (key == "name") {
          name = value;
        } else {
          fields[key] = parse_int_field(line, key, value);
        }
      }
    }
    if (name.empty()) throw ConfigError("arch: missing name in \"" + line + "\"");

    auto take = [&](const std::string& key, std::int64_t fallback,
                    bool required) -> std::int64_t {
      auto it = fields.find(key);
      if (it == fields.end()) {
        if (required) throw ConfigError("arch: missing " + key + " in \"" + line + "\"");
        return fallback;
      }
      const std::int64_t v = it->second;
      fields.erase(it);
      return v;
    };

    if (kind == "conv" || kind == "tconv") {
      const std::int64_t out = take("out", 0, true);
      const std::int64_t kernel = take("kernel", 0, true);
      const std::int64_t stride = take("stride", 1, false);
      const std::int64_t pad = take("pad", 0, false);
      if (kind == "conv") {
        append_conv(config, name, out, kernel, stride, pad, bn, relu);
      } else {
        if (config.layers.empty()) {
          throw ConfigError("arch: tconv cannot be the first layer in \"" + line + "\"");
        }
        append_tconv(config, name, out, kernel, stride, pad, bn, relu);
      }
    } else if (kind == "pool") {
      if (bn || relu) throw ConfigError("arch: pool takes no bn/relu in \"" + line + "\"");
      const std::int64_t size = take("size", 0, true);
      const std::int64_t stride = take("stride", size, false);
      append_pool(config, name, size, stride);
    } else {
      throw ConfigError("arch: unknown layer kind \"" + kind + "\" in \"" + line + "\"");
    }
    if (!fields.empty()) {
      throw ConfigError("arch: unknown field \"" + fields.begin()->first + "\" in \"" +
                        line + "\"");
    }
  }
  if (config.layers.empty()) throw ConfigError("arch: no layers");
  try {
    config.validate();
  } catch (const Error& e) {
    throw ConfigError(std::string("arch: ") + e.what());
  }
  return config;
}

std::string serialize_arch(const NetworkConfig& config) {
  const BlockIndex idx = block_index(config);
  std::ostringstream out;
  bool first = true;
  for (std::size_t i = 0; i < config.layers.size(); ++i) {
    const LayerSpec& layer = config.layers[i];
    if (!is_block_head(layer.kind)) continue;
    if (!first) out << "; ";
    first = false;
    if (layer.kind == LayerKind::kMaxPool) {
      out << "pool name=" << layer.name << " size=" << layer.pool.pool_size
          << " stride=" << layer.pool.stride;
    } else {
      out << (layer.kind == LayerKind::kConv ? "conv" : "tconv") << " name=" << layer.name
          << " out=" << layer.conv.out_channels << " kernel=" << layer.conv.kernel_size
          << " stride=" << layer.conv.stride << " pad=" << layer.conv.padding;
      for (std::size_t j = i + 1; j <= idx.end_of.at(i); ++j) {
        if (config.layers[j].kind == LayerKind::kBatchNorm) out << " bn";
        if (config.layers[j].kind == LayerKind::kRelu) out << " relu";
      }
    }
  }
  return out.str();
}

NetworkConfig network_for_id(const std::string& id) {
  if (id == "soundnet8") return build_soundnet8();
  if (id == "soundnet5") return build_soundnet5();
  if (id == "autoencoder4") return build_autoencoder4();
  const std::string prefix = "custom:";
  if (id.rfind(prefix, 0) == 0) return parse_arch(id.substr(prefix.size()));
  throw ConfigError("unknown network id \"" + id +
                    "\" (expected soundnet8, soundnet5, autoencoder4 or custom:<arch>)");
}

std::string network_id(const NetworkConfig& config) {
  if (config.id == "soundnet8" || config.id == "soundnet5" || config.id == "autoencoder4") {
    return config.id;
  }
  return "custom:" + serialize_arch(config);
}

// --- Parameters ----------------------------------------------------------

Parameters init_params(const NetworkConfig& config, std::uint64_t seed, Real weight_std) {
  config.validate();
  if (!(weight_std > 0)) throw Error("init_params: weight_std must be > 0");
  Parameters params;
  params.seed = seed;
  std::mt19937_64 rng(seed);
  std::normal_distribution<Real> gauss(0.0, weight_std);
  for (const LayerSpec& layer : config.layers) {
    switch (layer.kind) {
      case LayerKind::kConv:
      case LayerKind::kTransposedConv: {
        ConvParams p = conv_params_shell(layer);
        p.weights.resize(
            static_cast<std::size_t>(p.out_channels * p.in_channels * p.kernel_size));
        for (Real& w : p.weights) w = gauss(rng);
        p.bias.assign(static_cast<std::size_t>(conv_bias_length(layer)), 0.0);
        p.validate(layer.kind == LayerKind::kTransposedConv);
        params.conv.emplace(layer.name, std::move(p));
        break;
      }
      case LayerKind::kBatchNorm: {
        BatchNormParams p;
        const std::size_t n = static_cast<std::size_t>(layer.channels);
        p.gamma.assign(n, 1.0);
        p.beta.assign(n, 0.0);
        p.running_mean.assign(n, 0.0);
        p.running_var.assign(n, 1.0);
        p.running_initialized = false;
        params.bn.emplace(layer.name, std::move(p));
        break;
      }
      default:
        break;
    }
  }
  return params;
}

void validate_params(const NetworkConfig& config, const Parameters& params) {
  for (const LayerSpec& layer : config.layers) {
    const std::string where = "network " + config.id + ", layer \"" + layer.name + "\"";
    if (layer.kind == LayerKind::kConv || layer.kind == LayerKind::kTransposedConv) {
      auto it = params.conv.find(layer.name);
      if (it == params.conv.end()) throw Error(where + ": missing conv parameters");
      const ConvParams shell = conv_params_shell(layer);
      const ConvParams& p = it->second;
      if (p.out_channels != shell.out_channels || p.in_channels != shell.in_channels ||
          p.kernel_size != shell.kernel_size || p.stride != shell.stride ||
          p.padding != shell.padding) {
        throw ShapeError(where + ": conv parameters disagree with the layer geometry");
      }
      p.validate(layer.kind == LayerKind::kTransposedConv);
    } else if (layer.kind == LayerKind::kBatchNorm) {
      auto it = params.bn.find(layer.name);
      if (it == params.bn.end()) throw Error(where + ": missing batchnorm parameters");
      it->second.validate();
      if (it->second.channels() != layer.channels) {
        throw ShapeError(where + ": batchnorm parameters disagree with the layer width");
      }
    }
  }
}

std::int64_t parameter_count(const NetworkConfig& config) {
  std::int64_t total = 0;
  for (const LayerSpec& layer : config.layers) {
    switch (layer.kind) {
      case LayerKind::kConv:
      case LayerKind::kTransposedConv:
        total += layer.conv.in_channels * layer.conv.out_channels * layer.conv.kernel_size;
        total += conv_bias_length(layer);
        break;
      case LayerKind::kBatchNorm:
        total += 4 * layer.channels;
        break;
      default:
        break;
    }
  }
  return total;
}

// --- Shape law -----------------------------------------------------------

std::vector<std::pair<std::string, std::int64_t>> layer_output_lengths(
    const NetworkConfig& config, std::int64_t input_length) {
  config.validate();
  const BlockIndex idx = block_index(config);
  std::vector<std::pair<std::string, std::int64_t>> out;
  std::int64_t length = input_length;
  for (std::size_t i = 0; i < config.layers.size(); ++i) {
    const LayerSpec& layer = config.layers[i];
    switch (layer.kind) {
      case LayerKind::kConv:
        length = conv1d_output_length(length, layer.conv.kernel_size, layer.conv.stride,
                                      layer.conv.padding);
        break;
      case LayerKind::kTransposedConv:
        length = transposed_conv1d_output_length(length, layer.conv.kernel_size,
                                                 layer.conv.stride, layer.conv.padding);
        break;
      case LayerKind::kMaxPool:
        if (length < layer.pool.pool_size) length = 0;
        else length = maxpool1d_output_length(length, layer.pool.pool_size, layer.pool.stride);
        break;
      default:
        break;
    }
    if (length < 1) {
      throw ShapeError("network " + config.id + ": input length " +
                       std::to_string(input_length) + " underflows at layer \"" +
                       layer.name + "\"; minimum admissible length is " +
                       std::to_string(minimum_input_length(config)));
    }
    if (idx.end_of.at(idx.head_of[i]) == i) {
      out.emplace_back(config.layers[idx.head_of[i]].name, length);
    }
  }
  return out;
}

std::int64_t minimum_input_length(const NetworkConfig& config, const std::string& up_to) {
  const std::size_t last = last_layer_for(config, up_to);
  std::int64_t need = 1;
  for (std::size_t j = last + 1; j-- > 0;) {
    const LayerSpec& layer = config.layers[j];
    switch (layer.kind) {
      case LayerKind::kConv:
        need = std::max<std::int64_t>(
            1, layer.conv.stride * (need - 1) + layer.conv.kernel_size -
                   2 * layer.conv.padding);
        break;
      case LayerKind::kTransposedConv:
        need = std::max<std::int64_t>(
            1, ceil_div(need + 2 * layer.conv.padding - layer.conv.kernel_size,
                        layer.conv.stride) +
                   1);
        break;
      case LayerKind::kMaxPool:
        need = layer.pool.stride * (need - 1) + layer.pool.pool_size;
        break;
      default:
        break;
    }
  }
  return need;
}

// --- Execution -----------------------------------------------------------

ForwardResult forward(const NetworkConfig& config, const Parameters& params,
                      const Tensor3& input, const ForwardOptions& options) {
  config.validate();
  validate_params(config, params);
  if (input.channels != config.input_channels) {
    throw ShapeError("network " + config.id + ": input has " +
                     std::to_string(input.channels) + " channels, expected " +
                     std::to_string(config.input_channels));
  }
  if (input.batch < 1 || input.length < 1) {
    throw ShapeError("network " + config.id + ": empty input " + input.shape_str());
  }
  if (!input.all_finite()) {
    throw Error("network " + config.id + ": input contains non-finite samples");
  }
  const std::size_t last = last_layer_for(config, options.stop_after);
  const std::int64_t min_length = minimum_input_length(config, options.stop_after);
  if (input.length < min_length) {
    throw ShapeError("network " + config.id + ": input length " +
                     std::to_string(input.length) +
                     " is below the minimum admissible length " +
                     std::to_string(min_length) +
                     (options.stop_after.empty() ? std::string()
                                                 : " for layer " + options.stop_after));
  }

  const BlockIndex idx = block_index(config);
  const std::set<std::string> taps(config.taps.begin(), config.taps.end());

  ForwardResult result;
  Tensor3 holder;             // previous layer output when no trace is kept
  const Tensor3* src = &input;
  for (std::size_t i = 0; i <= last; ++i) {
    const LayerSpec& layer = config.layers[i];
    Tensor3 out;
    std::vector<std::int64_t> argmax;
    BatchNormCache cache;
    switch (layer.kind) {
      case LayerKind::kConv:
        out = conv1d_forward(*src, params.conv.at(layer.name));
        break;
      case LayerKind::kTransposedConv:
        out = transposed_conv1d_forward(*src, params.conv.at(layer.name));
        break;
      case LayerKind::kMaxPool: {
        MaxPoolResult pooled =
            maxpool1d_forward(*src, layer.pool.pool_size, layer.pool.stride);
        out = std::move(pooled.output);
        argmax = std::move(pooled.argmax);
        break;
      }
      case LayerKind::kBatchNorm:
        out = batchnorm_forward(*src, params.bn.at(layer.name), options.mode, &cache);
        if (options.mode == BatchNormMode::kTrain) {
          result.bn_updates.emplace_back(layer.name, cache);
        }
        break;
      case LayerKind::kRelu:
        out = relu_forward(*src);
        break;
    }
    if (options.want_trace) {
      result.trace.outputs.push_back(std::move(out));
      result.trace.pool_argmax.push_back(std::move(argmax));
      result.trace.bn_caches.push_back(std::move(cache));
      src = &result.trace.outputs.back();
    } else {
      holder = std::move(out);
      src = &holder;
    }
    if (idx.end_of.at(idx.head_of[i]) == i) {
      const std::string& head = config.layers[idx.head_of[i]].name;
      if (taps.count(head) != 0) result.activations.emplace(head, *src);
    }
  }
  result.trace.layers_run = options.want_trace ? last + 1 : 0;
  result.output = *src;
  return result;
}

void apply_running_updates(Parameters& params, const ForwardResult& result) {
  for (const auto& [name, cache] : result.bn_updates) {
    bn_update_running(params.bn.at(name), cache);
  }
}

Tensor3 backward(const NetworkConfig& config, const Parameters& params,
                 const Tensor3& input, const ForwardTrace& trace,
                 const Tensor3& grad_output, ParamGrads* grads) {
  if (trace.layers_run == 0 || trace.outputs.size() < trace.layers_run) {
    throw Error("network " + config.id + ": backward needs a forward trace");
  }
  Tensor3 grad = grad_output;
  for (std::size_t i = trace.layers_run; i-- > 0;) {
    const LayerSpec& layer = config.layers[i];
    const Tensor3& layer_in = (i == 0) ? input : trace.outputs[i - 1];
    switch (layer.kind) {
      case LayerKind::kConv:
        grad = conv1d_backward(layer_in, params.conv.at(layer.name), grad,
                               grads ? &grads->conv[layer.name] : nullptr);
        break;
      case LayerKind::kTransposedConv:
        grad = transposed_conv1d_backward(layer_in, params.conv.at(layer.name), grad,
                                          grads ? &grads->conv[layer.name] : nullptr);
        break;
      case LayerKind::kMaxPool: {
        MaxPoolResult fwd;
        fwd.argmax = trace.pool_argmax[i];
        grad = maxpool1d_backward(layer_in, layer.pool.pool_size, layer.pool.stride, fwd,
                                  grad);
        break;
      }
      case LayerKind::kBatchNorm:
        grad = batchnorm_backward(layer_in, params.bn.at(layer.name), trace.bn_caches[i],
                                  grad, grads ? &grads->bn[layer.name] : nullptr);
        break;
      case LayerKind::kRelu:
        grad = relu_backward(layer_in, grad);
        break;
    }
  }
  return grad;
}

}  // namespace soundnet
