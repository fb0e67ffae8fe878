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

#include "termdialog/model/trainer.h"

#include <cmath>
#include <cstdio>
#include <numeric>

#include "termdialog/error.h"
#include "termdialog/model/adam.h"
#include "termdialog/model/data.h"
#include "termdialog/text.h"

namespace termdialog {

// ---------------------------------------------------------------------------
// Data preparation

std::vector<std::string> model_tokens(const AnnotatedSequence& seq) {
  std::vector<std::string> out;
  out.reserve(seq.flattened.size());
  for (const auto& s : seq.flattened) {
    out.push_back(s == kTermMarker ? s : to_lower(s));
  }
  return out;
}

Example make_example(const AnnotatedPair& pair, const Vocab& vocab,
                     const ExampleOptions& options) {
  if (options.max_len < 2) throw ConfigError("max_len must be at least 2");
  Example ex;
  size_t token_index = 0;
  for (const auto& s : pair.src.flattened) {
    if (s == kTermMarker) {
      ex.src_ids.push_back(Vocab::kTerm);
      ex.labels.push_back(1);
      ex.cls_mask.push_back(options.classify_on_markers ? 1 : 0);
    } else {
      ex.src_ids.push_back(vocab.id(to_lower(s)));
      ex.labels.push_back(pair.src.labels.at(token_index++));
      ex.cls_mask.push_back(1);
    }
  }
  const size_t max_len = static_cast<size_t>(options.max_len);
  if (ex.src_ids.size() > max_len) {
    const auto drop = static_cast<long>(ex.src_ids.size() - max_len);
    ex.src_ids.erase(ex.src_ids.begin(), ex.src_ids.begin() + drop);
    ex.labels.erase(ex.labels.begin(), ex.labels.begin() + drop);
    ex.cls_mask.erase(ex.cls_mask.begin(), ex.cls_mask.begin() + drop);
  }

  std::vector<int> tgt = vocab.encode(model_tokens(pair.tgt));
  if (tgt.size() > max_len - 1) tgt.resize(max_len - 1);
  ex.tgt_in.push_back(Vocab::kBos);
  ex.tgt_in.insert(ex.tgt_in.end(), tgt.begin(), tgt.end());
  ex.tgt_out = tgt;
  ex.tgt_out.push_back(Vocab::kEos);
  return ex;
}

std::vector<Example> make_examples(const std::vector<AnnotatedPair>& pairs,
                                   const Vocab& vocab,
                                   const ExampleOptions& options) {
  std::vector<Example> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) out.push_back(make_example(p, vocab, options));
  return out;
}

Vocab build_vocab(const std::vector<AnnotatedPair>& pairs, int min_freq) {
  std::vector<std::vector<std::string>> corpus;
  corpus.reserve(2 * pairs.size());
  for (const auto& p : pairs) {
    corpus.push_back(model_tokens(p.src));
    corpus.push_back(model_tokens(p.tgt));
  }
  return build_vocab(corpus, min_freq);
}

std::string detokenize(const std::vector<int>& ids, const Vocab& vocab) {
  std::string out;
  for (int id : ids) {
    if (Vocab::is_special(id)) continue;
    if (!out.empty()) out += ' ';
    out += vocab.token(id);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Training

TrainConfig TrainConfig::desk() {
  TrainConfig c;
  c.batch_size = 8;
  return c;
}

void TrainConfig::validate() const {
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (!(learning_rate > 0)) throw ConfigError("learning_rate must be > 0");
  if (epochs < 1) throw ConfigError("epochs must be >= 1");
  if (max_steps < 0) throw ConfigError("max_steps must be >= 0");
  if (!(beta1 >= 0 && beta1 < 1 && beta2 >= 0 && beta2 < 1 && epsilon > 0)) {
    throw ConfigError("invalid Adam hyperparameters");
  }
}

double perplexity(const Seq2SeqModel<double>& model,
                  const std::vector<Example>& examples) {
  double total = 0;
  size_t count = 0;
  for (const auto& ex : examples) {
    for (double nll : token_nlls(model, ex)) {
      total += nll;
      ++count;
    }
  }
  if (count == 0) throw ValidationError("perplexity of an empty set");
  return std::exp(total / static_cast<double>(count));
}

double classifier_accuracy(const Seq2SeqModel<double>& model,
                           const std::vector<Example>& examples) {
  size_t correct = 0, total = 0;
  for (const auto& ex : examples) {
    const Vector<double> probs = model.classify_terms(ex.src_ids);
    for (size_t i = 0; i < ex.labels.size(); ++i) {
      if (!ex.cls_mask[i]) continue;
      const int predicted = probs(static_cast<Eigen::Index>(i)) >= 0.5 ? 1 : 0;
      correct += (predicted == ex.labels[i]);
      ++total;
    }
  }
  return total == 0 ? 1.0 : static_cast<double>(correct) / static_cast<double>(total);
}

TrainResult train(const std::vector<Example>& train_set,
                  const std::vector<Example>& val_set, const TrainConfig& tcfg,
                  const ModelConfig& mcfg, const StepCallback& on_step) {
  tcfg.validate();
  mcfg.validate();
  if (train_set.empty()) throw ValidationError("training set is empty");

  Rng init_rng(tcfg.seed);
  Rng order_rng(tcfg.seed ^ 0x9E3779B97F4A7C15ULL);
  Rng dropout_rng(tcfg.seed + 1);
  Seq2SeqModel<double> model(mcfg, ModelParams<double>::initialized(mcfg, init_rng));
  Adam<double> adam(mcfg, {tcfg.learning_rate, tcfg.beta1, tcfg.beta2, tcfg.epsilon});
  ModelParams<double> grads = ModelParams<double>::zeros(mcfg);
  const LossOptions loss_options{1.0, tcfg.use_auxiliary ? 1.0 : 0.0, 1.0};

  TrainResult result;
  result.best_params = model.params();
  std::vector<size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::vector<Example> batch;
  bool stop = false;
  int step = 0;

  for (int epoch = 0; epoch < tcfg.epochs && !stop; ++epoch) {
    order_rng.shuffle(order);
    for (size_t begin = 0; begin < order.size() && !stop;
         begin += static_cast<size_t>(tcfg.batch_size)) {
      const size_t end = std::min(order.size(), begin + static_cast<size_t>(tcfg.batch_size));
      batch.clear();
      for (size_t i = begin; i < end; ++i) batch.push_back(train_set[order[i]]);

      grads.set_zero();
      LossBreakdown<double> loss;
      try {
        loss = loss_and_gradients(model, std::span<const Example>(batch),
                                  loss_options, &grads, &dropout_rng);
      } catch (const DivergenceError& e) {
        throw DivergenceError("step " + std::to_string(step + 1) + ", epoch " +
                              std::to_string(epoch) + ": " + e.what());
      }
      if (tcfg.grad_clip > 0) {
        const double norm = std::sqrt(grads.squared_norm());
        if (!std::isfinite(norm)) {
          throw DivergenceError("non-finite gradient norm at step " +
                                std::to_string(step + 1));
        }
        if (norm > tcfg.grad_clip) {
          const double scale = tcfg.grad_clip / norm;
          for (auto& t : grads.tensors()) *t.tensor *= scale;
        }
      }
      adam.step(&model.mutable_params(), grads);
      ++step;

      HistoryRow row;
      row.step = step;
      row.epoch = epoch;
      row.lm_loss = loss.lm_loss;
      row.classifier_loss = loss.classifier_loss;
      row.overall_loss = loss.overall_loss;
      result.history.push_back(row);
      if (on_step && !on_step(row)) stop = true;
      if (tcfg.max_steps > 0 && step >= tcfg.max_steps) stop = true;
    }

    if (!val_set.empty()) {
      const double ppl = perplexity(model, val_set);
      result.history.back().val_ppl = ppl;
      if (result.best_epoch < 0 || ppl < result.best_val_ppl) {
        result.best_val_ppl = ppl;
        result.best_epoch = epoch;
        result.best_params = model.params();
      }
    }
  }

  result.steps = step;
  result.final_params = model.params();
  if (val_set.empty()) {
    result.best_params = result.final_params;
    result.best_epoch = result.history.empty() ? -1 : result.history.back().epoch;
  }
  return result;
}

Seq2SeqModel<double> train_probe(const Seq2SeqModel<double>& model,
                                 const std::vector<Example>& train_set,
                                 int steps, double learning_rate, uint64_t seed) {
  const ModelConfig& cfg = model.config();
  std::vector<Matrix<double>> features;
  size_t positions = 0;
  for (const auto& ex : train_set) {
    features.push_back(model.encode(ex.src_ids));
    for (uint8_t m : ex.cls_mask) positions += m;
  }
  Seq2SeqModel<double> probe = model;
  if (positions == 0) return probe;

  // Fresh head so the probe does not inherit anything from joint training.
  Rng rng(seed);
  ModelParams<double>& p = probe.mutable_params();
  const double s1 = 1.0 / std::sqrt(static_cast<double>(cfg.d_model));
  for (Eigen::Index i = 0; i < p.cls_w1.size(); ++i) p.cls_w1.data()[i] = s1 * rng.normal();
  for (Eigen::Index i = 0; i < p.cls_w2.size(); ++i) p.cls_w2.data()[i] = s1 * rng.normal();
  p.cls_b1.setZero();
  p.cls_b2.setZero();

  Adam<double> adam(cfg, {learning_rate, 0.9, 0.999, 1e-8});
  ModelParams<double> grads = ModelParams<double>::zeros(cfg);
  const double scale = 1.0 / static_cast<double>(positions);
  for (int step = 0; step < steps; ++step) {
    grads.set_zero();
    for (size_t b = 0; b < train_set.size(); ++b) {
      const Example& ex = train_set[b];
      const Matrix<double>& f = features[b];
      Matrix<double> hidden = linear(f, p.cls_w1, p.cls_b1).array().tanh().matrix();
      Matrix<double> z = linear(hidden, p.cls_w2, p.cls_b2);
      Matrix<double> dz(z.rows(), 1);
      for (Eigen::Index i = 0; i < z.rows(); ++i) {
        const auto k = static_cast<size_t>(i);
        dz(i, 0) = ex.cls_mask[k] ? (logistic(z(i, 0)) - ex.labels[k]) * scale : 0.0;
      }
      Matrix<double> dhidden = linear_backward(hidden, p.cls_w2, dz, &grads.cls_w2, &grads.cls_b2);
      Matrix<double> dpre = dhidden.array() * (1.0 - hidden.array().square());
      linear_backward(f, p.cls_w1, dpre, &grads.cls_w1, &grads.cls_b1);
    }
    adam.step(&p, grads);
  }
  return probe;
}

std::string history_csv(const std::vector<HistoryRow>& history) {
  std::string out = "step,lm_loss,classifier_loss,overall_loss,val_ppl\n";
  char buf[256];
  for (const auto& r : history) {
    std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.17g,", r.step, r.lm_loss,
                  r.classifier_loss, r.overall_loss);
    out += buf;
    if (!std::isnan(r.val_ppl)) {
      std::snprintf(buf, sizeof(buf), "%.17g", r.val_ppl);
      out += buf;
    }
    out += '\n';
  }
  return out;
}

}  // namespace termdialog
