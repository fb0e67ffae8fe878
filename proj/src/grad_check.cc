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

#include "termdialog/model/grad_check.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "termdialog/random.h"

namespace termdialog {
namespace {

using Wide = long double;

Wide weighted_loss(const Seq2SeqModel<Wide>& model,
                   std::span<const Example> batch, const LossOptions& o) {
  const LossBreakdown<Wide> l = evaluate_loss(model, batch);
  return static_cast<Wide>(o.upstream) *
         (static_cast<Wide>(o.lm_weight) * l.lm_loss +
          static_cast<Wide>(o.classifier_weight) * l.classifier_loss);
}

// The differences are taken in extended precision; in double the roundoff
// of L(w + h) - L(w - h) alone is ~1e-11 at h = 1e-5.
Seq2SeqModel<Wide> widen(const Seq2SeqModel<double>& model) {
  ModelParams<Wide> p = ModelParams<Wide>::zeros(model.config());
  auto dst = p.tensors();
  const auto src = model.params().tensors();
  for (size_t i = 0; i < dst.size(); ++i) *dst[i].tensor = src[i].tensor->cast<Wide>();
  return Seq2SeqModel<Wide>(model.config(), std::move(p));
}

}  // namespace

GradCheckReport gradient_check(const Seq2SeqModel<double>& model,
                               std::span<const Example> batch,
                               const LossOptions& options,
                               int coords_per_tensor, double step,
                               uint64_t seed) {
  ModelParams<double> grads = ModelParams<double>::zeros(model.config());
  GradCheckReport report;
  report.loss = loss_and_gradients(model, batch, options, &grads).overall_loss;

  Seq2SeqModel<Wide> probe = widen(model);
  auto params = probe.mutable_params().tensors();
  const auto analytic = grads.tensors();
  Rng rng(seed);
  for (size_t t = 0; t < params.size(); ++t) {
    Matrix<Wide>& tensor = *params[t].tensor;
    const auto n = static_cast<uint64_t>(tensor.size());
    // Distinct coordinates; every one of them when the tensor is small.
    std::vector<Eigen::Index> order(n);
    for (uint64_t i = 0; i < n; ++i) order[i] = static_cast<Eigen::Index>(i);
    rng.shuffle(order);
    order.resize(std::min<uint64_t>(std::max(coords_per_tensor, 0), n));
    for (const Eigen::Index idx : order) {
      const Wide h = step;
      Wide& w = tensor.data()[idx];
      const Wide saved = w;
      w = saved + h;
      const Wide plus = weighted_loss(probe, batch, options);
      w = saved - h;
      const Wide minus = weighted_loss(probe, batch, options);
      w = saved;

      GradCheckEntry e;
      e.tensor = params[t].name;
      e.index = idx;
      e.analytic = analytic[t].tensor->data()[idx];
      e.numeric = static_cast<double>((plus - minus) / (2 * h));
      e.rel_error = std::abs(e.analytic - e.numeric) / std::max(std::abs(e.analytic), 1e-8);
      report.max_rel_error = std::max(report.max_rel_error, e.rel_error);
      report.entries.push_back(std::move(e));
    }
  }
  return report;
}

}  // namespace termdialog
