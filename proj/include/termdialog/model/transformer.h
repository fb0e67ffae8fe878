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

#ifndef TERMDIALOG_MODEL_TRANSFORMER_H_
#define TERMDIALOG_MODEL_TRANSFORMER_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "termdialog/model/layers.h"
#include "termdialog/model/tensor.h"
#include "termdialog/random.h"

namespace termdialog {

struct ModelConfig {
  int vocab_size = 0;
  int d_model = 64;
  int n_heads = 4;
  int n_enc_layers = 2;
  int n_dec_layers = 2;
  int ffn_dim = 256;
  int max_len = 128;
  double dropout = 0.0;

  // Throws ConfigError.
  void validate() const;
  bool operator==(const ModelConfig&) const = default;
};

template <typename Scalar>
struct EncoderLayerParams {
  AttentionParams<Scalar> self_attn;
  Matrix<Scalar> ln1_gamma, ln1_beta;
  FeedForwardParams<Scalar> ffn;
  Matrix<Scalar> ln2_gamma, ln2_beta;
};

template <typename Scalar>
struct DecoderLayerParams {
  AttentionParams<Scalar> self_attn;
  Matrix<Scalar> ln1_gamma, ln1_beta;
  AttentionParams<Scalar> cross_attn;
  Matrix<Scalar> ln2_gamma, ln2_beta;
  FeedForwardParams<Scalar> ffn;
  Matrix<Scalar> ln3_gamma, ln3_beta;
};

template <typename Scalar>
struct NamedTensor {
  std::string name;
  Matrix<Scalar>* tensor;
};

template <typename Scalar>
struct ConstNamedTensor {
  std::string name;
  const Matrix<Scalar>* tensor;
};

// Every trainable tensor. Biases are 1 x n matrices; the LM head is
// logits = O lm_w + lm_b with lm_w of shape d_model x vocab.
template <typename Scalar>
struct ModelParams {
  Matrix<Scalar> embed;    // vocab x d_model, shared by encoder and decoder
  Matrix<Scalar> enc_pos;  // max_len x d_model, learned
  Matrix<Scalar> dec_pos;
  std::vector<EncoderLayerParams<Scalar>> enc;
  std::vector<DecoderLayerParams<Scalar>> dec;
  Matrix<Scalar> lm_w, lm_b;
  // Terminology classifier: tanh hidden layer, then one logit.
  Matrix<Scalar> cls_w1, cls_b1, cls_w2, cls_b2;

  static ModelParams zeros(const ModelConfig& config);
  // Embeddings ~ N(0, 0.02^2), projections ~ N(0, 1/fan_in), biases 0,
  // layer-norm gains 1.
  static ModelParams initialized(const ModelConfig& config, Rng& rng);

  // Tensors in a fixed order with stable names; identical for any two
  // parameter sets of the same config.
  std::vector<NamedTensor<Scalar>> tensors();
  std::vector<ConstNamedTensor<Scalar>> tensors() const;

  size_t parameter_count() const;
  bool all_finite() const;
  void set_zero();
  Scalar squared_norm() const;
};

// Per-position outputs of one (source, target-prefix) pair.
template <typename Scalar>
struct ForwardOutput {
  Matrix<Scalar> features;     // F: one row per source position
  Matrix<Scalar> decoded;      // O: one row per decoder input position
  Matrix<Scalar> lm_logits;    // row t scores the token after tgt_ids[t]
  Vector<Scalar> term_logits;  // classifier logit per source position
  Vector<Scalar> term_probs;   // logistic(term_logits)
};

template <typename Scalar>
struct EncoderLayerCache {
  Matrix<Scalar> input;
  AttentionCache<Scalar> attn;
  Matrix<Scalar> attn_mask;
  LayerNormCache<Scalar> ln1;
  Matrix<Scalar> hidden;
  FeedForwardCache<Scalar> ffn;
  Matrix<Scalar> ffn_mask;
  LayerNormCache<Scalar> ln2;
};

template <typename Scalar>
struct DecoderLayerCache {
  Matrix<Scalar> input;
  AttentionCache<Scalar> self_attn;
  Matrix<Scalar> self_mask;
  LayerNormCache<Scalar> ln1;
  Matrix<Scalar> hidden1;
  AttentionCache<Scalar> cross_attn;
  Matrix<Scalar> cross_mask;
  LayerNormCache<Scalar> ln2;
  Matrix<Scalar> hidden2;
  FeedForwardCache<Scalar> ffn;
  Matrix<Scalar> ffn_mask;
  LayerNormCache<Scalar> ln3;
};

// Everything backward() needs from one forward pass.
template <typename Scalar>
struct ForwardCache {
  std::vector<int> src_ids;
  std::vector<int> tgt_ids;
  Matrix<Scalar> enc_embed_mask;
  Matrix<Scalar> dec_embed_mask;
  std::vector<EncoderLayerCache<Scalar>> enc;
  std::vector<DecoderLayerCache<Scalar>> dec;
  Matrix<Scalar> cls_hidden;
  ForwardOutput<Scalar> out;
};

// Encoder-decoder with self-attention, LM head, and terminology classifier
// head on the encoder features. Post-norm residual blocks, GELU FFNs.
template <typename Scalar>
class Seq2SeqModel {
 public:
  Seq2SeqModel(ModelConfig config, ModelParams<Scalar> params);

  const ModelConfig& config() const { return config_; }
  const ModelParams<Scalar>& params() const { return params_; }
  ModelParams<Scalar>& mutable_params() { return params_; }

  // F = Encoder(src). Eval mode. Throws ValidationError on bad ids/lengths.
  Matrix<Scalar> encode(std::span<const int> src_ids) const;

  // Eval-mode forward. tgt_ids is the decoder input, starting with BOS.
  ForwardOutput<Scalar> forward(std::span<const int> src_ids,
                                std::span<const int> tgt_ids) const;

  // Training-mode forward. Dropout masks are drawn from `dropout_rng` when
  // it is non-null and config.dropout > 0.
  void forward(std::span<const int> src_ids, std::span<const int> tgt_ids,
               ForwardCache<Scalar>* cache, Rng* dropout_rng) const;

  // Accumulates parameter gradients for upstream gradients on the LM logits
  // and classifier logits.
  void backward(const ForwardCache<Scalar>& cache,
                const Matrix<Scalar>& d_lm_logits,
                const Vector<Scalar>& d_term_logits,
                ModelParams<Scalar>* grads) const;

  // Decoder logits for a prefix given precomputed encoder features.
  Matrix<Scalar> decode_logits(const Matrix<Scalar>& features,
                               std::span<const int> tgt_ids) const;

  // Classifier probabilities per source position.
  Vector<Scalar> classify_terms(std::span<const int> src_ids) const;
  Vector<Scalar> classify_features(const Matrix<Scalar>& features) const;

 private:
  void check_ids(std::span<const int> ids, const char* what) const;
  Matrix<Scalar> embed(std::span<const int> ids, const Matrix<Scalar>& pos) const;
  Matrix<Scalar> run_encoder(std::span<const int> src_ids,
                             ForwardCache<Scalar>* cache, Rng* rng) const;
  Matrix<Scalar> run_decoder(const Matrix<Scalar>& features,
                             std::span<const int> tgt_ids,
                             ForwardCache<Scalar>* cache, Rng* rng) const;

  ModelConfig config_;
  ModelParams<Scalar> params_;
};

// One training example in model form.
struct Example {
  std::vector<int> src_ids;
  std::vector<int> tgt_in;           // BOS y_1 ... y_m
  std::vector<int> tgt_out;          // y_1 ... y_m EOS; kPad entries ignored
  std::vector<uint8_t> labels;       // e_i per source position
  std::vector<uint8_t> cls_mask;     // 1 = position enters the BCE
};

template <typename Scalar>
struct LossBreakdown {
  Scalar lm_loss = 0;
  Scalar classifier_loss = 0;
  Scalar overall_loss = 0;
  size_t lm_tokens = 0;
  size_t classifier_positions = 0;
};

// lm_loss: mean -log P(y_t | y_<t, X) over non-pad target positions of the
// whole batch. classifier_loss: mean binary cross-entropy over positions with
// cls_mask = 1. overall = lm + classifier. Throws ValidationError on
// misaligned lengths. An empty mask gives a classifier loss of 0.
template <typename Scalar>
LossBreakdown<Scalar> compute_loss(std::span<const ForwardOutput<Scalar>> outputs,
                                   std::span<const Example> batch);

struct LossOptions {
  double lm_weight = 1.0;
  double classifier_weight = 1.0;
  // Scales every gradient; 0 checks the zero-upstream limit.
  double upstream = 1.0;
};

// Forward + loss + backward over a batch. Gradients are of
// upstream * (lm_weight * lm_loss + classifier_weight * classifier_loss) and
// are accumulated into *grads (which must be shaped like the params).
// Throws DivergenceError if the loss is not finite.
template <typename Scalar>
LossBreakdown<Scalar> loss_and_gradients(const Seq2SeqModel<Scalar>& model,
                                         std::span<const Example> batch,
                                         const LossOptions& options,
                                         ModelParams<Scalar>* grads,
                                         Rng* dropout_rng = nullptr);

// Eval-mode batch loss without gradients.
template <typename Scalar>
LossBreakdown<Scalar> evaluate_loss(const Seq2SeqModel<Scalar>& model,
                                    std::span<const Example> batch);

// Teacher-forced per-token NLL (nats) of tgt_out, skipping kPad.
template <typename Scalar>
std::vector<double> token_nlls(const Seq2SeqModel<Scalar>& model,
                               const Example& example);

extern template struct ModelParams<float>;
extern template struct ModelParams<double>;
extern template class Seq2SeqModel<float>;
extern template class Seq2SeqModel<double>;
extern template struct ModelParams<long double>;
extern template class Seq2SeqModel<long double>;

}  // namespace termdialog

#endif  // TERMDIALOG_MODEL_TRANSFORMER_H_
