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

#ifndef SOUNDNET_LOSS_HPP_
#define SOUNDNET_LOSS_HPP_

#include <string>

#include "soundnet/network.hpp"
#include "soundnet/tensor.hpp"

namespace soundnet {

enum class DistillLoss { kKl, kL2 };

DistillLoss parse_distill_loss(const std::string& name);  // "kl" | "l2"
std::string to_string(DistillLoss loss);

// Teacher-matching loss over (batch, classes, time) logits. The channel axis
// holds both heads back to back; each head is softmaxed per timestep and
// compared against the teacher slice. Head losses are summed, then averaged
// over batch and timesteps:
//
//   kl:  D(teacher || softmax(student))
//   l2:  1/2 * || softmax(student) - teacher ||^2
//
// When grad is non-null it receives d(loss)/d(student logits), same shape.
Real distill_loss(const Tensor3& student_logits, const Tensor3& teacher,
                  const HeadSplit& split, DistillLoss loss, Tensor3* grad);

// Mean squared error over all elements; grad (same shape as output) is
// 2 * (output - target) / numel.
Real reconstruction_mse(const Tensor3& output, const Tensor3& target, Tensor3* grad);

}  // namespace soundnet

#endif  // SOUNDNET_LOSS_HPP_
