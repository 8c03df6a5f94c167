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

#include "soundnet/checkpoint.hpp"

#include <cstddef>
#include <utility>
#include <vector>

#include "soundnet/binio.hpp"
#include "soundnet/error.hpp"

namespace soundnet {

namespace {

constexpr const char kMagic[] = "SNDC";

void write_block(ByteWriter& w, const std::string& name,
                 const std::vector<std::uint32_t>& dims, const std::vector<Real>& values) {
  w.str(name);
  w.u32(static_cast<std::uint32_t>(dims.size()));
  std::size_t count = 1;
  for (const std::uint32_t d : dims) {
    w.u32(d);
    count *= d;
  }
  if (count != values.size()) {
    throw Error("checkpoint: block " + name + " dims disagree with value count");
  }
  for (const Real v : values) w.f32(static_cast<float>(v));
}

std::vector<Real> read_block(ByteReader& r, const std::string& name,
                             const std::vector<std::uint32_t>& want_dims) {
  const std::uint32_t rank = r.u32();
  if (rank != want_dims.size()) {
    throw FormatError(FormatError::Code::kCorrupt,
                      r.what() + ": block " + name + " has rank " + std::to_string(rank) +
                          ", expected " + std::to_string(want_dims.size()));
  }
  std::size_t count = 1;
  for (const std::uint32_t want : want_dims) {
    const std::uint32_t got = r.u32();
    if (got != want) {
      throw FormatError(FormatError::Code::kCorrupt,
                        r.what() + ": block " + name + " dimension " + std::to_string(got) +
                            " does not match the architecture (" + std::to_string(want) +
                            ")");
    }
    count *= want;
  }
  std::vector<Real> values(count);
  for (Real& v : values) v = static_cast<Real>(r.f32());
  return values;
}

std::uint32_t count_blocks(const NetworkConfig& config) {
  std::uint32_t n = 0;
  for (const LayerSpec& layer : config.layers) {
    if (layer.kind == LayerKind::kConv || layer.kind == LayerKind::kTransposedConv) n += 2;
    if (layer.kind == LayerKind::kBatchNorm) n += 4;
  }
  return n;
}

}  // namespace

void save_checkpoint(const std::string& path, const NetworkConfig& config,
                     const Parameters& params, std::uint64_t iteration, double loss) {
  config.validate();
  validate_params(config, params);

  ByteWriter w;
  w.bytes(kMagic, 4);
  w.u32(kCheckpointVersion);
  w.str(network_id(config));
  w.u64(iteration);
  w.u64(params.seed);
  w.f64(loss);
  w.u32(count_blocks(config));
  for (const LayerSpec& layer : config.layers) {
    if (layer.kind == LayerKind::kConv || layer.kind == LayerKind::kTransposedConv) {
      const ConvParams& p = params.conv.at(layer.name);
      write_block(w, layer.name + ".weight",
                  {static_cast<std::uint32_t>(p.out_channels),
                   static_cast<std::uint32_t>(p.in_channels),
                   static_cast<std::uint32_t>(p.kernel_size)},
                  p.weights);
      write_block(w, layer.name + ".bias", {static_cast<std::uint32_t>(p.bias.size())},
                  p.bias);
    } else if (layer.kind == LayerKind::kBatchNorm) {
      const BatchNormParams& p = params.bn.at(layer.name);
      const std::uint32_t c = static_cast<std::uint32_t>(p.channels());
      write_block(w, layer.name + ".gamma", {c}, p.gamma);
      write_block(w, layer.name + ".beta", {c}, p.beta);
      write_block(w, layer.name + ".running_mean", {c}, p.running_mean);
      write_block(w, layer.name + ".running_var", {c}, p.running_var);
    }
  }
  w.write_file(path);
}

Checkpoint load_checkpoint(const std::string& path) {
  ByteReader r = ByteReader::open(path, kMagic);
  const std::uint32_t version = r.u32();
  if (version != kCheckpointVersion) {
    throw FormatError(FormatError::Code::kBadVersion,
                      path + ": checkpoint version " + std::to_string(version) +
                          ", expected " + std::to_string(kCheckpointVersion));
  }

  Checkpoint ck;
  ck.network_id = r.str();
  ck.iteration = r.u64();
  ck.params.seed = r.u64();
  ck.loss = r.f64();

  NetworkConfig config;
  try {
    config = network_for_id(ck.network_id);
  } catch (const Error& e) {
    throw FormatError(FormatError::Code::kCorrupt, path + ": " + e.what());
  }

  const std::uint32_t block_count = r.u32();
  if (block_count != count_blocks(config)) {
    throw FormatError(FormatError::Code::kCorrupt,
                      path + ": " + std::to_string(block_count) + " blocks, architecture " +
                          ck.network_id + " needs " +
                          std::to_string(count_blocks(config)));
  }

  // Blocks are ordered by layer, so reading tracks the architecture walk.
  for (const LayerSpec& layer : config.layers) {
    if (layer.kind == LayerKind::kConv || layer.kind == LayerKind::kTransposedConv) {
      ConvParams p;
      const bool transposed = layer.kind == LayerKind::kTransposedConv;
      p.out_channels = transposed ? layer.conv.in_channels : layer.conv.out_channels;
      p.in_channels = transposed ? layer.conv.out_channels : layer.conv.in_channels;
      p.kernel_size = layer.conv.kernel_size;
      p.stride = layer.conv.stride;
      p.padding = layer.conv.padding;
      for (int part = 0; part < 2; ++part) {
        const std::string name = r.str();
        const std::string want =
            layer.name + (part == 0 ? ".weight" : ".bias");
        if (name != want) {
          throw FormatError(FormatError::Code::kCorrupt,
                            path + ": block \"" + name + "\" where \"" + want +
                                "\" was expected");
        }
        if (part == 0) {
          p.weights = read_block(r, name,
                                 {static_cast<std::uint32_t>(p.out_channels),
                                  static_cast<std::uint32_t>(p.in_channels),
                                  static_cast<std::uint32_t>(p.kernel_size)});
        } else {
          p.bias = read_block(r, name,
                              {static_cast<std::uint32_t>(layer.conv.out_channels)});
        }
      }
      ck.params.conv.emplace(layer.name, std::move(p));
    } else if (layer.kind == LayerKind::kBatchNorm) {
      BatchNormParams p;
      const char* parts[4] = {".gamma", ".beta", ".running_mean", ".running_var"};
      for (int part = 0; part < 4; ++part) {
        const std::string name = r.str();
        const std::string want = layer.name + parts[part];
        if (name != want) {
          throw FormatError(FormatError::Code::kCorrupt,
                            path + ": block \"" + name + "\" where \"" + want +
                                "\" was expected");
        }
        std::vector<Real> values =
            read_block(r, name, {static_cast<std::uint32_t>(layer.channels)});
        switch (part) {
          case 0: p.gamma = std::move(values); break;
          case 1: p.beta = std::move(values); break;
          case 2: p.running_mean = std::move(values); break;
          default: p.running_var = std::move(values); break;
        }
      }
      p.running_initialized = true;
      ck.params.bn.emplace(layer.name, std::move(p));
    }
  }
  r.require_end();
  validate_params(config, ck.params);
  return ck;
}

}  // namespace soundnet
