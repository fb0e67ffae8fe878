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

#ifndef TERMDIALOG_MODEL_ADAM_H_
#define TERMDIALOG_MODEL_ADAM_H_

#include <cmath>

#include "termdialog/model/transformer.h"

namespace termdialog {

struct AdamConfig {
  double learning_rate = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Adam with bias correction over every tensor of a ModelParams.
template <typename Scalar>
class Adam {
 public:
  Adam(const ModelConfig& config, AdamConfig hp)
      : hp_(hp),
        m_(ModelParams<Scalar>::zeros(config)),
        v_(ModelParams<Scalar>::zeros(config)) {}

  void step(ModelParams<Scalar>* params, const ModelParams<Scalar>& grads) {
    ++t_;
    const double c1 = 1.0 - std::pow(hp_.beta1, t_);
    const double c2 = 1.0 - std::pow(hp_.beta2, t_);
    const Scalar b1 = Scalar(hp_.beta1), b2 = Scalar(hp_.beta2);
    const Scalar lr = Scalar(hp_.learning_rate / c1);
    const Scalar inv_c2 = Scalar(1.0 / c2);
    const Scalar eps = Scalar(hp_.epsilon);
    auto p = params->tensors();
    auto g = grads.tensors();
    auto m = m_.tensors();
    auto v = v_.tensors();
    for (size_t i = 0; i < p.size(); ++i) {
      auto ga = g[i].tensor->array();
      m[i].tensor->array() = b1 * m[i].tensor->array() + (Scalar(1) - b1) * ga;
      v[i].tensor->array() = b2 * v[i].tensor->array() + (Scalar(1) - b2) * ga.square();
      p[i].tensor->array() -=
          lr * m[i].tensor->array() / ((v[i].tensor->array() * inv_c2).sqrt() + eps);
    }
  }

  long steps() const { return t_; }

 private:
  AdamConfig hp_;
  ModelParams<Scalar> m_;
  ModelParams<Scalar> v_;
  long t_ = 0;
};

}  // namespace termdialog

#endif  // TERMDIALOG_MODEL_ADAM_H_
