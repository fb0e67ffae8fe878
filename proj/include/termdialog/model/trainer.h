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

#ifndef TERMDIALOG_MODEL_TRAINER_H_
#define TERMDIALOG_MODEL_TRAINER_H_

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "termdialog/model/transformer.h"

namespace termdialog {

struct TrainConfig {
  int batch_size = 36;
  double learning_rate = 1e-4;
  int epochs = 10;
  uint64_t seed = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  // Global gradient-norm clip; <= 0 disables clipping.
  double grad_clip = 1.0;
  bool classify_on_markers = false;
  // Train on L_lm + L_classifier when set, on L_lm alone otherwise.
  bool use_auxiliary = true;
  // Stops after this many optimizer steps when > 0.
  int max_steps = 0;

  // Desk-scale preset: the defaults with a batch of 8.
  static TrainConfig desk();

  void validate() const;
};

struct HistoryRow {
  int step = 0;
  int epoch = 0;
  double lm_loss = 0;
  double classifier_loss = 0;
  double overall_loss = 0;
  // Set on the last step of each epoch when a validation set is present.
  double val_ppl = std::numeric_limits<double>::quiet_NaN();
};

struct TrainResult {
  ModelParams<double> best_params;   // lowest validation perplexity
  ModelParams<double> final_params;
  std::vector<HistoryRow> history;
  double best_val_ppl = std::numeric_limits<double>::quiet_NaN();
  int best_epoch = -1;
  int steps = 0;
};

// Called after every optimizer step; returning false stops training.
using StepCallback = std::function<bool(const HistoryRow&)>;

// Adam on the joint loss. Batches follow a seeded per-epoch shuffle, so the
// run is deterministic given config and data. Validation perplexity is
// computed after each epoch and the best parameters are retained (the final
// parameters when there is no validation set). Throws DivergenceError on a
// non-finite loss before any update is applied.
TrainResult train(const std::vector<Example>& train_set,
                  const std::vector<Example>& val_set, const TrainConfig& tcfg,
                  const ModelConfig& mcfg, const StepCallback& on_step = {});

// exp(mean token NLL) over the set under teacher forcing.
double perplexity(const Seq2SeqModel<double>& model,
                  const std::vector<Example>& examples);

// Accuracy of thresholding classifier probabilities at 0.5 against the gold
// labels, over positions with cls_mask = 1.
double classifier_accuracy(const Seq2SeqModel<double>& model,
                           const std::vector<Example>& examples);

// Trains only the classifier head on frozen encoder features (a linear-ish
// probe of what the encoder already knows). Returns the model with the new
// head; all other tensors are untouched.
Seq2SeqModel<double> train_probe(const Seq2SeqModel<double>& model,
                                 const std::vector<Example>& train_set,
                                 int steps, double learning_rate, uint64_t seed);

std::string history_csv(const std::vector<HistoryRow>& history);

}  // namespace termdialog

#endif  // TERMDIALOG_MODEL_TRAINER_H_
