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

#ifndef SOUNDNET_CHECKPOINT_HPP_
#define SOUNDNET_CHECKPOINT_HPP_

#include <cstdint>
#include <string>

#include "soundnet/network.hpp"

namespace soundnet {

// Checkpoint container ("SNDC"), little-endian throughout:
//
//   magic "SNDC" | u32 version | str network_id | u64 iteration | u64 seed
//   | f64 loss | u32 block_count | block... | u32 crc32(all preceding bytes)
//
// Each block: str name | u32 rank | u32 dims[rank] | f32 values[prod(dims)].
// str is a u32 length prefix plus raw bytes. Blocks appear in layer order:
// "<conv>.weight" (out, in, kernel), "<conv>.bias", then "<bn>.gamma",
// ".beta", ".running_mean", ".running_var". Values are stored as f32; a
// load/save round trip is byte-identical.
//
// A checkpoint is a training artifact: loading one marks all batchnorm
// running statistics as initialized.
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  std::string network_id;
  std::uint64_t iteration = 0;
  double loss = 0.0;
  Parameters params;  // params.seed carries the run seed
};

void save_checkpoint(const std::string& path, const NetworkConfig& config,
                     const Parameters& params, std::uint64_t iteration, double loss);

// The caller resolves the architecture with network_for_id(ck.network_id).
Checkpoint load_checkpoint(const std::string& path);

}  // namespace soundnet

#endif  // SOUNDNET_CHECKPOINT_HPP_
