// Copyright 2026 The TermDialog Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef TERMDIALOG_MODEL_GRAD_CHECK_H_
#define TERMDIALOG_MODEL_GRAD_CHECK_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "termdialog/model/transformer.h"

namespace termdialog {

struct GradCheckEntry {
  std::string tensor;
  Eigen::Index index = 0;
  double analytic = 0;
  double numeric = 0;
  double rel_error = 0;
};

struct GradCheckReport {
  std::vector<GradCheckEntry> entries;
  double max_rel_error = 0;
  double loss = 0;
};

// Compares backprop gradients of the joint loss with central differences
// (L(w + h) - L(w - h)) / 2h at `coords_per_tensor` distinct random
// coordinates of every parameter tensor (all of them for smaller tensors).
// The perturbed losses are evaluated in long double. Relative error is
// |g - g_fd| / max(|g|, 1e-8). Runs in eval mode (no dropout).
GradCheckReport gradient_check(const Seq2SeqModel<double>& model,
                               std::span<const Example> batch,
                               const LossOptions& options,
                               int coords_per_tensor, double step,
                               uint64_t seed);

}  // namespace termdialog

#endif  // TERMDIALOG_MODEL_GRAD_CHECK_H_
