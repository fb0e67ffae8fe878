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

#include "termdialog/model/transformer.h"

#include <cmath>
#include <string_view>

#include "termdialog/error.h"
#include "termdialog/vocab.h"

namespace termdialog {
namespace {

template <typename P, typename Fn>
void visit_attention(P& a, const std::string& prefix, Fn& fn) {
  fn(prefix + ".wq", a.wq);
  fn(prefix + ".bq", a.bq);
  fn(prefix + ".wk", a.wk);
  fn(prefix + ".bk", a.bk);
  fn(prefix + ".wv", a.wv);
  fn(prefix + ".bv", a.bv);
  fn(prefix + ".wo", a.wo);
  fn(prefix + ".bo", a.bo);
}

template <typename P, typename Fn>
void visit_ffn(P& f, const std::string& prefix, Fn& fn) {
  fn(prefix + ".w1", f.w1);
  fn(prefix + ".b1", f.b1);
  fn(prefix + ".w2", f.w2);
  fn(prefix + ".b2", f.b2);
}

// Calls fn(name, tensor) for every parameter tensor in canonical order.
template <typename P, typename Fn>
void visit_params(P& p, Fn fn) {
  fn(std::string("embed"), p.embed);
  fn(std::string("enc_pos"), p.enc_pos);
  fn(std::string("dec_pos"), p.dec_pos);
  for (size_t l = 0; l < p.enc.size(); ++l) {
    auto& layer = p.enc[l];
    const std::string prefix = "enc." + std::to_string(l);
    visit_attention(layer.self_attn, prefix + ".self_attn", fn);
    fn(prefix + ".ln1.gamma", layer.ln1_gamma);
    fn(prefix + ".ln1.beta", layer.ln1_beta);
    visit_ffn(layer.ffn, prefix + ".ffn", fn);
    fn(prefix + ".ln2.gamma", layer.ln2_gamma);
    fn(prefix + ".ln2.beta", layer.ln2_beta);
  }
  for (size_t l = 0; l < p.dec.size(); ++l) {
    auto& layer = p.dec[l];
    const std::string prefix = "dec." + std::to_string(l);
    visit_attention(layer.self_attn, prefix + ".self_attn", fn);
    fn(prefix + ".ln1.gamma", layer.ln1_gamma);
    fn(prefix + ".ln1.beta", layer.ln1_beta);
    visit_attention(layer.cross_attn, prefix + ".cross_attn", fn);
    fn(prefix + ".ln2.gamma", layer.ln2_gamma);
    fn(prefix + ".ln2.beta", layer.ln2_beta);
    visit_ffn(layer.ffn, prefix + ".ffn", fn);
    fn(prefix + ".ln3.gamma", layer.ln3_gamma);
    fn(prefix + ".ln3.beta", layer.ln3_beta);
  }
  fn(std::string("lm_w"), p.lm_w);
  fn(std::string("lm_b"), p.lm_b);
  fn(std::string("cls_w1"), p.cls_w1);
  fn(std::string("cls_b1"), p.cls_b1);
  fn(std::string("cls_w2"), p.cls_w2);
  fn(std::string("cls_b2"), p.cls_b2);
}

template <typename Scalar>
AttentionParams<Scalar> attention_zeros(int d) {
  AttentionParams<Scalar> a;
  for (auto* w : {&a.wq, &a.wk, &a.wv, &a.wo}) w->setZero(d, d);
  for (auto* b : {&a.bq, &a.bk, &a.bv, &a.bo}) b->setZero(1, d);
  return a;
}

template <typename Scalar>
FeedForwardParams<Scalar> ffn_zeros(int d, int ffn) {
  FeedForwardParams<Scalar> f;
  f.w1.setZero(d, ffn);
  f.b1.setZero(1, ffn);
  f.w2.setZero(ffn, d);
  f.b2.setZero(1, d);
  return f;
}

enum class TensorKind { kEmbedding, kWeight, kBias, kGain };

TensorKind tensor_kind(std::string_view name) {
  const size_t dot = name.rfind('.');
  const std::string_view leaf = dot == std::string_view::npos ? name : name.substr(dot + 1);
  if (leaf == "embed" || leaf == "enc_pos" || leaf == "dec_pos") {
    return TensorKind::kEmbedding;
  }
  if (leaf == "gamma") return TensorKind::kGain;
  if (leaf == "beta") return TensorKind::kBias;
  if (leaf.front() == 'w' || leaf.find("_w") != std::string_view::npos) {
    return TensorKind::kWeight;
  }
  return TensorKind::kBias;
}

template <typename Scalar>
void dropout(Matrix<Scalar>* x, Matrix<Scalar>* mask, double rate, Rng* rng) {
  if (rng == nullptr || rate <= 0.0) {
    mask->resize(0, 0);
    return;
  }
  const Scalar keep = Scalar(1.0 / (1.0 - rate));
  mask->resize(x->rows(), x->cols());
  for (Eigen::Index i = 0; i < mask->size(); ++i) {
    mask->data()[i] = rng->uniform() < rate ? Scalar(0) : keep;
  }
  x->array() *= mask->array();
}

template <typename Scalar>
Matrix<Scalar> dropout_backward(const Matrix<Scalar>& d, const Matrix<Scalar>& mask) {
  if (mask.size() == 0) return d;
  return d.cwiseProduct(mask);
}

}  // namespace

void ModelConfig::validate() const {
  if (vocab_size <= Vocab::kNumSpecials - 1) {
    throw ConfigError("vocab_size must cover the special tokens");
  }
  if (d_model <= 0 || n_heads <= 0 || n_enc_layers <= 0 || n_dec_layers <= 0 ||
      ffn_dim <= 0 || max_len <= 0) {
    throw ConfigError("model dimensions must be positive");
  }
  if (d_model % n_heads != 0) {
    throw ConfigError("d_model must be divisible by n_heads");
  }
  if (!(dropout >= 0.0 && dropout < 1.0)) {
    throw ConfigError("dropout must lie in [0, 1)");
  }
}

// ---------------------------------------------------------------------------
// ModelParams

template <typename Scalar>
ModelParams<Scalar> ModelParams<Scalar>::zeros(const ModelConfig& config) {
  config.validate();
  const int d = config.d_model;
  ModelParams p;
  p.embed.setZero(config.vocab_size, d);
  p.enc_pos.setZero(config.max_len, d);
  p.dec_pos.setZero(config.max_len, d);
  for (int l = 0; l < config.n_enc_layers; ++l) {
    EncoderLayerParams<Scalar> layer;
    layer.self_attn = attention_zeros<Scalar>(d);
    layer.ffn = ffn_zeros<Scalar>(d, config.ffn_dim);
    for (auto* m : {&layer.ln1_gamma, &layer.ln1_beta, &layer.ln2_gamma,
                    &layer.ln2_beta}) {
      m->setZero(1, d);
    }
    p.enc.push_back(std::move(layer));
  }
  for (int l = 0; l < config.n_dec_layers; ++l) {
    DecoderLayerParams<Scalar> layer;
    layer.self_attn = attention_zeros<Scalar>(d);
    layer.cross_attn = attention_zeros<Scalar>(d);
    layer.ffn = ffn_zeros<Scalar>(d, config.ffn_dim);
    for (auto* m : {&layer.ln1_gamma, &layer.ln1_beta, &layer.ln2_gamma,
                    &layer.ln2_beta, &layer.ln3_gamma, &layer.ln3_beta}) {
      m->setZero(1, d);
    }
    p.dec.push_back(std::move(layer));
  }
  p.lm_w.setZero(d, config.vocab_size);
  p.lm_b.setZero(1, config.vocab_size);
  p.cls_w1.setZero(d, d);
  p.cls_b1.setZero(1, d);
  p.cls_w2.setZero(d, 1);
  p.cls_b2.setZero(1, 1);
  return p;
}

template <typename Scalar>
ModelParams<Scalar> ModelParams<Scalar>::initialized(const ModelConfig& config,
                                                     Rng& rng) {
  ModelParams p = zeros(config);
  visit_params(p, [&rng](const std::string& name, Matrix<Scalar>& t) {
    switch (tensor_kind(name)) {
      case TensorKind::kEmbedding:
        for (Eigen::Index i = 0; i < t.size(); ++i) {
          t.data()[i] = Scalar(0.02 * rng.normal());
        }
        break;
      case TensorKind::kWeight: {
        const double stddev = 1.0 / std::sqrt(static_cast<double>(t.rows()));
        for (Eigen::Index i = 0; i < t.size(); ++i) {
          t.data()[i] = Scalar(stddev * rng.normal());
        }
        break;
      }
      case TensorKind::kGain:
        t.setOnes();
        break;
      case TensorKind::kBias:
        break;
    }
  });
  return p;
}

template <typename Scalar>
std::vector<NamedTensor<Scalar>> ModelParams<Scalar>::tensors() {
  std::vector<NamedTensor<Scalar>> out;
  visit_params(*this, [&out](const std::string& name, Matrix<Scalar>& t) {
    out.push_back({name, &t});
  });
  return out;
}

template <typename Scalar>
std::vector<ConstNamedTensor<Scalar>> ModelParams<Scalar>::tensors() const {
  std::vector<ConstNamedTensor<Scalar>> out;
  visit_params(*this, [&out](const std::string& name, const Matrix<Scalar>& t) {
    out.push_back({name, &t});
  });
  return out;
}

template <typename Scalar>
size_t ModelParams<Scalar>::parameter_count() const {
  size_t n = 0;
  for (const auto& t : tensors()) n += static_cast<size_t>(t.tensor->size());
  return n;
}

template <typename Scalar>
bool ModelParams<Scalar>::all_finite() const {
  for (const auto& t : tensors()) {
    if (!t.tensor->allFinite()) return false;
  }
  return true;
}

template <typename Scalar>
void ModelParams<Scalar>::set_zero() {
  for (auto& t : tensors()) t.tensor->setZero();
}

template <typename Scalar>
Scalar ModelParams<Scalar>::squared_norm() const {
  Scalar total = 0;
  for (const auto& t : tensors()) total += t.tensor->squaredNorm();
  return total;
}

// ---------------------------------------------------------------------------
// Seq2SeqModel

template <typename Scalar>
Seq2SeqModel<Scalar>::Seq2SeqModel(ModelConfig config, ModelParams<Scalar> params)
    : config_(config), params_(std::move(params)) {
  config_.validate();
  if (params_.embed.rows() != config_.vocab_size ||
      params_.embed.cols() != config_.d_model ||
      static_cast<int>(params_.enc.size()) != config_.n_enc_layers ||
      static_cast<int>(params_.dec.size()) != config_.n_dec_layers ||
      params_.enc_pos.rows() != config_.max_len ||
      params_.lm_w.cols() != config_.vocab_size) {
    throw ValidationError("parameter shapes do not match the model config");
  }
}

template <typename Scalar>
void Seq2SeqModel<Scalar>::check_ids(std::span<const int> ids,
                                     const char* what) const {
  if (ids.empty()) {
    throw ValidationError(std::string(what) + " sequence is empty");
  }
  if (static_cast<int>(ids.size()) > config_.max_len) {
    throw ValidationError(std::string(what) + " sequence longer than max_len");
  }
  for (int id : ids) {
    if (id < 0 || id >= config_.vocab_size) {
      throw ValidationError(std::string(what) + " id out of range: " +
                            std::to_string(id));
    }
  }
}

template <typename Scalar>
Matrix<Scalar> Seq2SeqModel<Scalar>::embed(std::span<const int> ids,
                                           const Matrix<Scalar>& pos) const {
  const Eigen::Index n = static_cast<Eigen::Index>(ids.size());
  Matrix<Scalar> x(n, config_.d_model);
  for (Eigen::Index t = 0; t < n; ++t) {
    x.row(t) = params_.embed.row(ids[static_cast<size_t>(t)]) + pos.row(t);
  }
  return x;
}

template <typename Scalar>
Matrix<Scalar> Seq2SeqModel<Scalar>::run_encoder(std::span<const int> src_ids,
                                                 ForwardCache<Scalar>* cache,
                                                 Rng* rng) const {
  const int heads = config_.n_heads;
  const double rate = config_.dropout;
  Matrix<Scalar> x = embed(src_ids, params_.enc_pos);
  Matrix<Scalar> scratch_mask;
  dropout(&x, cache ? &cache->enc_embed_mask : &scratch_mask, rate, rng);
  EncoderLayerCache<Scalar> scratch;
  if (cache) cache->enc.resize(params_.enc.size());
  for (size_t l = 0; l < params_.enc.size(); ++l) {
    const auto& p = params_.enc[l];
    EncoderLayerCache<Scalar>& c = cache ? cache->enc[l] : scratch;
    c.input = x;
    Matrix<Scalar> a = attention(p.self_attn, x, x, heads, false, &c.attn);
    dropout(&a, &c.attn_mask, rate, rng);
    c.hidden = layer_norm<Scalar>(x + a, p.ln1_gamma, p.ln1_beta, &c.ln1);
    Matrix<Scalar> f = feed_forward(p.ffn, c.hidden, &c.ffn);
    dropout(&f, &c.ffn_mask, rate, rng);
    x = layer_norm<Scalar>(c.hidden + f, p.ln2_gamma, p.ln2_beta, &c.ln2);
  }
  return x;
}

template <typename Scalar>
Matrix<Scalar> Seq2SeqModel<Scalar>::run_decoder(const Matrix<Scalar>& features,
                                                 std::span<const int> tgt_ids,
                                                 ForwardCache<Scalar>* cache,
                                                 Rng* rng) const {
  const int heads = config_.n_heads;
  const double rate = config_.dropout;
  Matrix<Scalar> y = embed(tgt_ids, params_.dec_pos);
  Matrix<Scalar> scratch_mask;
  dropout(&y, cache ? &cache->dec_embed_mask : &scratch_mask, rate, rng);
  DecoderLayerCache<Scalar> scratch;
  if (cache) cache->dec.resize(params_.dec.size());
  for (size_t l = 0; l < params_.dec.size(); ++l) {
    const auto& p = params_.dec[l];
    DecoderLayerCache<Scalar>& c = cache ? cache->dec[l] : scratch;
    c.input = y;
    Matrix<Scalar> a = attention(p.self_attn, y, y, heads, true, &c.self_attn);
    dropout(&a, &c.self_mask, rate, rng);
    c.hidden1 = layer_norm<Scalar>(y + a, p.ln1_gamma, p.ln1_beta, &c.ln1);
    Matrix<Scalar> x =
        attention(p.cross_attn, c.hidden1, features, heads, false, &c.cross_attn);
    dropout(&x, &c.cross_mask, rate, rng);
    c.hidden2 = layer_norm<Scalar>(c.hidden1 + x, p.ln2_gamma, p.ln2_beta, &c.ln2);
    Matrix<Scalar> f = feed_forward(p.ffn, c.hidden2, &c.ffn);
    dropout(&f, &c.ffn_mask, rate, rng);
    y = layer_norm<Scalar>(c.hidden2 + f, p.ln3_gamma, p.ln3_beta, &c.ln3);
  }
  return y;
}

template <typename Scalar>
Matrix<Scalar> Seq2SeqModel<Scalar>::encode(std::span<const int> src_ids) const {
  check_ids(src_ids, "source");
  return run_encoder(src_ids, nullptr, nullptr);
}

template <typename Scalar>
Matrix<Scalar> Seq2SeqModel<Scalar>::decode_logits(
    const Matrix<Scalar>& features, std::span<const int> tgt_ids) const {
  check_ids(tgt_ids, "target");
  return linear(run_decoder(features, tgt_ids, nullptr, nullptr), params_.lm_w,
                params_.lm_b);
}

template <typename Scalar>
Vector<Scalar> Seq2SeqModel<Scalar>::classify_features(
    const Matrix<Scalar>& features) const {
  Matrix<Scalar> hidden =
      linear(features, params_.cls_w1, params_.cls_b1).array().tanh().matrix();
  Matrix<Scalar> logits = linear(hidden, params_.cls_w2, params_.cls_b2);
  return logits.col(0).unaryExpr([](Scalar z) { return logistic(z); });
}

template <typename Scalar>
Vector<Scalar> Seq2SeqModel<Scalar>::classify_terms(
    std::span<const int> src_ids) const {
  return classify_features(encode(src_ids));
}

template <typename Scalar>
void Seq2SeqModel<Scalar>::forward(std::span<const int> src_ids,
                                   std::span<const int> tgt_ids,
                                   ForwardCache<Scalar>* cache,
                                   Rng* dropout_rng) const {
  check_ids(src_ids, "source");
  check_ids(tgt_ids, "target");
  cache->src_ids.assign(src_ids.begin(), src_ids.end());
  cache->tgt_ids.assign(tgt_ids.begin(), tgt_ids.end());
  ForwardOutput<Scalar>& out = cache->out;
  out.features = run_encoder(src_ids, cache, dropout_rng);
  out.decoded = run_decoder(out.features, tgt_ids, cache, dropout_rng);
  out.lm_logits = linear(out.decoded, params_.lm_w, params_.lm_b);
  cache->cls_hidden =
      linear(out.features, params_.cls_w1, params_.cls_b1).array().tanh().matrix();
  out.term_logits =
      linear(cache->cls_hidden, params_.cls_w2, params_.cls_b2).col(0);
  out.term_probs = out.term_logits.unaryExpr([](Scalar z) { return logistic(z); });
}

template <typename Scalar>
ForwardOutput<Scalar> Seq2SeqModel<Scalar>::forward(
    std::span<const int> src_ids, std::span<const int> tgt_ids) const {
  ForwardCache<Scalar> cache;
  forward(src_ids, tgt_ids, &cache, nullptr);
  return std::move(cache.out);
}

template <typename Scalar>
void Seq2SeqModel<Scalar>::backward(const ForwardCache<Scalar>& cache,
                                    const Matrix<Scalar>& d_lm_logits,
                                    const Vector<Scalar>& d_term_logits,
                                    ModelParams<Scalar>* g) const {
  const int heads = config_.n_heads;
  const ModelParams<Scalar>& p = params_;
  const Matrix<Scalar>& features = cache.out.features;

  Matrix<Scalar> dy =
      linear_backward(cache.out.decoded, p.lm_w, d_lm_logits, &g->lm_w, &g->lm_b);

  // Classifier head on F.
  Matrix<Scalar> dz = d_term_logits;
  Matrix<Scalar> dhidden =
      linear_backward(cache.cls_hidden, p.cls_w2, dz, &g->cls_w2, &g->cls_b2);
  Matrix<Scalar> dpre =
      dhidden.array() * (Scalar(1) - cache.cls_hidden.array().square());
  Matrix<Scalar> dfeatures =
      linear_backward(features, p.cls_w1, dpre, &g->cls_w1, &g->cls_b1);

  Matrix<Scalar> dq, dkv;
  for (size_t l = p.dec.size(); l-- > 0;) {
    const auto& lp = p.dec[l];
    const auto& c = cache.dec[l];
    auto& lg = g->dec[l];
    Matrix<Scalar> dr =
        layer_norm_backward(c.ln3, lp.ln3_gamma, dy, &lg.ln3_gamma, &lg.ln3_beta);
    Matrix<Scalar> dh2 = dr + feed_forward_backward(lp.ffn, c.ffn, c.hidden2,
                                                    dropout_backward(dr, c.ffn_mask),
                                                    &lg.ffn);
    dr = layer_norm_backward(c.ln2, lp.ln2_gamma, dh2, &lg.ln2_gamma, &lg.ln2_beta);
    attention_backward(lp.cross_attn, c.cross_attn, c.hidden1, features,
                       dropout_backward(dr, c.cross_mask), heads, &lg.cross_attn,
                       &dq, &dkv);
    Matrix<Scalar> dh1 = dr + dq;
    dfeatures += dkv;
    dr = layer_norm_backward(c.ln1, lp.ln1_gamma, dh1, &lg.ln1_gamma, &lg.ln1_beta);
    attention_backward(lp.self_attn, c.self_attn, c.input, c.input,
                       dropout_backward(dr, c.self_mask), heads, &lg.self_attn,
                       &dq, &dkv);
    dy = dr + dq + dkv;
  }
  dy = dropout_backward(dy, cache.dec_embed_mask);
  for (size_t t = 0; t < cache.tgt_ids.size(); ++t) {
    const auto row = static_cast<Eigen::Index>(t);
    g->embed.row(cache.tgt_ids[t]) += dy.row(row);
    g->dec_pos.row(row) += dy.row(row);
  }

  Matrix<Scalar> dx = std::move(dfeatures);
  for (size_t l = p.enc.size(); l-- > 0;) {
    const auto& lp = p.enc[l];
    const auto& c = cache.enc[l];
    auto& lg = g->enc[l];
    Matrix<Scalar> dr =
        layer_norm_backward(c.ln2, lp.ln2_gamma, dx, &lg.ln2_gamma, &lg.ln2_beta);
    Matrix<Scalar> dh = dr + feed_forward_backward(lp.ffn, c.ffn, c.hidden,
                                                   dropout_backward(dr, c.ffn_mask),
                                                   &lg.ffn);
    dr = layer_norm_backward(c.ln1, lp.ln1_gamma, dh, &lg.ln1_gamma, &lg.ln1_beta);
    attention_backward(lp.self_attn, c.attn, c.input, c.input,
                       dropout_backward(dr, c.attn_mask), heads, &lg.self_attn,
                       &dq, &dkv);
    dx = dr + dq + dkv;
  }
  dx = dropout_backward(dx, cache.enc_embed_mask);
  for (size_t t = 0; t < cache.src_ids.size(); ++t) {
    const auto row = static_cast<Eigen::Index>(t);
    g->embed.row(cache.src_ids[t]) += dx.row(row);
    g->enc_pos.row(row) += dx.row(row);
  }
}

// ---------------------------------------------------------------------------
// Losses

namespace {

struct LossCounts {
  size_t lm_tokens = 0;
  size_t cls_positions = 0;
};

LossCounts count_targets(std::span<const Example> batch) {
  LossCounts c;
  for (const auto& ex : batch) {
    for (int id : ex.tgt_out) c.lm_tokens += (id != Vocab::kPad);
    for (uint8_t m : ex.cls_mask) c.cls_positions += (m != 0);
  }
  return c;
}

void check_alignment(const Example& ex, Eigen::Index lm_rows,
                     Eigen::Index src_rows) {
  if (static_cast<Eigen::Index>(ex.tgt_out.size()) != lm_rows) {
    throw ValidationError("target labels do not align with decoder positions");
  }
  if (static_cast<Eigen::Index>(ex.labels.size()) != src_rows ||
      static_cast<Eigen::Index>(ex.cls_mask.size()) != src_rows) {
    throw ValidationError("term labels do not align with source positions");
  }
}

// Per-example sums; log-probabilities are returned for gradient reuse.
template <typename Scalar>
void example_loss_sums(const ForwardOutput<Scalar>& out, const Example& ex,
                       Matrix<Scalar>* log_probs, double* lm_sum,
                       double* cls_sum) {
  check_alignment(ex, out.lm_logits.rows(), out.term_logits.size());
  *log_probs = log_softmax_rows(out.lm_logits);
  const int vocab = static_cast<int>(out.lm_logits.cols());
  for (size_t t = 0; t < ex.tgt_out.size(); ++t) {
    const int gold = ex.tgt_out[t];
    if (gold == Vocab::kPad) continue;
    if (gold < 0 || gold >= vocab) {
      throw ValidationError("target id out of range: " + std::to_string(gold));
    }
    *lm_sum -= static_cast<double>((*log_probs)(static_cast<Eigen::Index>(t), gold));
  }
  for (size_t i = 0; i < ex.labels.size(); ++i) {
    if (!ex.cls_mask[i]) continue;
    const Scalar z = out.term_logits(static_cast<Eigen::Index>(i));
    *cls_sum += static_cast<double>(softplus(z) - Scalar(ex.labels[i]) * z);
  }
}

template <typename Scalar>
LossBreakdown<Scalar> finish(double lm_sum, double cls_sum, const LossCounts& c) {
  LossBreakdown<Scalar> loss;
  loss.lm_tokens = c.lm_tokens;
  loss.classifier_positions = c.cls_positions;
  loss.lm_loss = c.lm_tokens ? Scalar(lm_sum / static_cast<double>(c.lm_tokens)) : Scalar(0);
  loss.classifier_loss =
      c.cls_positions ? Scalar(cls_sum / static_cast<double>(c.cls_positions)) : Scalar(0);
  loss.overall_loss = loss.lm_loss + loss.classifier_loss;
  return loss;
}

}  // namespace

template <typename Scalar>
LossBreakdown<Scalar> compute_loss(std::span<const ForwardOutput<Scalar>> outputs,
                                   std::span<const Example> batch) {
  if (outputs.size() != batch.size()) {
    throw ValidationError("batch and forward outputs differ in size");
  }
  double lm_sum = 0, cls_sum = 0;
  Matrix<Scalar> log_probs;
  for (size_t b = 0; b < batch.size(); ++b) {
    example_loss_sums(outputs[b], batch[b], &log_probs, &lm_sum, &cls_sum);
  }
  return finish<Scalar>(lm_sum, cls_sum, count_targets(batch));
}

template <typename Scalar>
LossBreakdown<Scalar> loss_and_gradients(const Seq2SeqModel<Scalar>& model,
                                         std::span<const Example> batch,
                                         const LossOptions& options,
                                         ModelParams<Scalar>* grads,
                                         Rng* dropout_rng) {
  const LossCounts counts = count_targets(batch);
  const Scalar lm_scale =
      counts.lm_tokens
          ? Scalar(options.upstream * options.lm_weight /
                   static_cast<double>(counts.lm_tokens))
          : Scalar(0);
  const Scalar cls_scale =
      counts.cls_positions
          ? Scalar(options.upstream * options.classifier_weight /
                   static_cast<double>(counts.cls_positions))
          : Scalar(0);

  double lm_sum = 0, cls_sum = 0;
  ForwardCache<Scalar> cache;
  Matrix<Scalar> log_probs;
  for (const Example& ex : batch) {
    model.forward(ex.src_ids, ex.tgt_in, &cache, dropout_rng);
    const ForwardOutput<Scalar>& out = cache.out;
    example_loss_sums(out, ex, &log_probs, &lm_sum, &cls_sum);

    // d/dlogits of -log softmax = softmax - onehot.
    Matrix<Scalar> d_logits = log_probs.array().exp().matrix();
    for (size_t t = 0; t < ex.tgt_out.size(); ++t) {
      const auto row = static_cast<Eigen::Index>(t);
      if (ex.tgt_out[t] == Vocab::kPad) {
        d_logits.row(row).setZero();
      } else {
        d_logits(row, ex.tgt_out[t]) -= Scalar(1);
      }
    }
    d_logits *= lm_scale;

    Vector<Scalar> d_term(out.term_logits.size());
    for (Eigen::Index i = 0; i < d_term.size(); ++i) {
      const auto k = static_cast<size_t>(i);
      d_term(i) = ex.cls_mask[k]
                      ? (out.term_probs(i) - Scalar(ex.labels[k])) * cls_scale
                      : Scalar(0);
    }
    model.backward(cache, d_logits, d_term, grads);
  }
  LossBreakdown<Scalar> loss = finish<Scalar>(lm_sum, cls_sum, counts);
  if (!std::isfinite(static_cast<double>(loss.overall_loss))) {
    throw DivergenceError("non-finite loss (lm " +
                          std::to_string(static_cast<double>(loss.lm_loss)) +
                          ", classifier " +
                          std::to_string(static_cast<double>(loss.classifier_loss)) +
                          ")");
  }
  return loss;
}

template <typename Scalar>
LossBreakdown<Scalar> evaluate_loss(const Seq2SeqModel<Scalar>& model,
                                    std::span<const Example> batch) {
  double lm_sum = 0, cls_sum = 0;
  Matrix<Scalar> log_probs;
  for (const Example& ex : batch) {
    const ForwardOutput<Scalar> out = model.forward(ex.src_ids, ex.tgt_in);
    example_loss_sums(out, ex, &log_probs, &lm_sum, &cls_sum);
  }
  return finish<Scalar>(lm_sum, cls_sum, count_targets(batch));
}

template <typename Scalar>
std::vector<double> token_nlls(const Seq2SeqModel<Scalar>& model,
                               const Example& example) {
  const ForwardOutput<Scalar> out = model.forward(example.src_ids, example.tgt_in);
  if (static_cast<Eigen::Index>(example.tgt_out.size()) != out.lm_logits.rows()) {
    throw ValidationError("target labels do not align with decoder positions");
  }
  const Matrix<Scalar> log_probs = log_softmax_rows(out.lm_logits);
  std::vector<double> nlls;
  for (size_t t = 0; t < example.tgt_out.size(); ++t) {
    if (example.tgt_out[t] == Vocab::kPad) continue;
    nlls.push_back(
        -static_cast<double>(log_probs(static_cast<Eigen::Index>(t), example.tgt_out[t])));
  }
  return nlls;
}

#define TERMDIALOG_INSTANTIATE(S)                                              \
  template struct ModelParams<S>;                                             \
  template class Seq2SeqModel<S>;                                             \
  template LossBreakdown<S> compute_loss<S>(std::span<const ForwardOutput<S>>, \
                                            std::span<const Example>);        \
  template LossBreakdown<S> loss_and_gradients<S>(                            \
      const Seq2SeqModel<S>&, std::span<const Example>, const LossOptions&,   \
      ModelParams<S>*, Rng*);                                                 \
  template LossBreakdown<S> evaluate_loss<S>(const Seq2SeqModel<S>&,          \
                                             std::span<const Example>);       \
  template std::vector<double> token_nlls<S>(const Seq2SeqModel<S>&,          \
                                             const Example&);

TERMDIALOG_INSTANTIATE(float)
TERMDIALOG_INSTANTIATE(double)
TERMDIALOG_INSTANTIATE(long double)

#undef TERMDIALOG_INSTANTIATE

}  // namespace termdialog
