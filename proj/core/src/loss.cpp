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

#include "soundnet/loss.hpp"

#include <vector>

#include "soundnet/error.hpp"
#include "soundnet/ops.hpp"

namespace soundnet {

DistillLoss parse_distill_loss(const std::string& name) {
  if (name == "kl") return DistillLoss::kKl;
  if (name == "l2") return DistillLoss::kL2;
  throw ConfigError("unknown loss \"" + name + "\" (expected kl or l2)");
}

std::string to_string(DistillLoss loss) {
  return loss == DistillLoss::kKl ? "kl" : "l2";
}

namespace {

// Channel values at a fixed (b, t) are strided by the row length; gather and
// scatter through these helpers.
void gather(const Tensor3& x, std::int64_t b, std::int64_t c0, std::int64_t t,
            std::vector<Real>& out) {
  for (std::size_t j = 0; j < out.size(); ++j) {
    out[j] = x.at(b, c0 + static_cast<std::int64_t>(j), t);
  }
}

}  // namespace

Real distill_loss(const Tensor3& student_logits, const Tensor3& teacher,
                  const HeadSplit& split, DistillLoss loss, Tensor3* grad) {
  check_same_shape(student_logits, teacher, "distill_loss");
  if (student_logits.channels != split.total()) {
    throw ShapeError("distill_loss: logits have " + std::to_string(student_logits.channels) +
                     " channels, head split expects " + std::to_string(split.total()));
  }
  if (grad != nullptr) {
    *grad = Tensor3(student_logits.batch, student_logits.channels, student_logits.length);
  }
  const std::int64_t heads[2][2] = {{0, split.object_classes},
                                    {split.object_classes, split.scene_classes}};
  const Real scale =
      Real(1) / static_cast<Real>(student_logits.batch * student_logits.length);

  Real total = 0;
  std::vector<Real> p;
  std::vector<Real> z;
  for (std::int64_t b = 0; b < student_logits.batch; ++b) {
    for (std::int64_t t = 0; t < student_logits.length; ++t) {
      for (const auto& head : heads) {
        const std::int64_t c0 = head[0];
        const std::size_t n = static_cast<std::size_t>(head[1]);
        p.resize(n);
        z.resize(n);
        gather(teacher, b, c0, t, p);
        gather(student_logits, b, c0, t, z);
        const std::vector<Real> s = softmax(z);
        if (loss == DistillLoss::kKl) {
          total += kl_divergence(p, s);
          if (grad != nullptr) {
            for (std::size_t j = 0; j < n; ++j) {
              grad->at(b, c0 + static_cast<std::int64_t>(j), t) = (s[j] - p[j]) * scale;
            }
          }
        } else {
          Real dot = 0;  // <s - p, s>, for the softmax Jacobian product
          for (std::size_t j = 0; j < n; ++j) {
            const Real d = s[j] - p[j];
            total += Real(0.5) * d * d;
            dot += d * s[j];
          }
          if (grad != nullptr) {
            for (std::size_t j = 0; j < n; ++j) {
              const Real d = s[j] - p[j];
              grad->at(b, c0 + static_cast<std::int64_t>(j), t) = s[j] * (d - dot) * scale;
            }
          }
        }
      }
    }
  }
  return total * scale;
}

Real reconstruction_mse(const Tensor3& output, const Tensor3& target, Tensor3* grad) {
  check_same_shape(output, target, "reconstruction_mse");
  const Real n = static_cast<Real>(output.numel());
  if (grad != nullptr) {
    *grad = Tensor3(output.batch, output.channels, output.length);
  }
  Real total = 0;
  for (std::size_t i = 0; i < output.values.size(); ++i) {
    const Real d = output.values[i] - target.values[i];
    total += d * d;
    if (grad != nullptr) grad->values[i] = Real(2) * d / n;
  }
  return total / n;
}

}  // namespace soundnet
