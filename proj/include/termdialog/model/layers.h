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

#ifndef TERMDIALOG_MODEL_LAYERS_H_
#define TERMDIALOG_MODEL_LAYERS_H_

// Forward/backward primitives for the encoder-decoder. Backward functions
// accumulate (+=) into parameter gradients and return or overwrite the
// input gradient.

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "termdialog/model/tensor.h"

namespace termdialog {

// Y = X W + b, with b stored as a 1 x out matrix.
template <typename DX, typename DW, typename DB>
Matrix<typename DX::Scalar> linear(const Eigen::MatrixBase<DX>& x,
                                   const Eigen::MatrixBase<DW>& w,
                                   const Eigen::MatrixBase<DB>& b) {
  Matrix<typename DX::Scalar> y = x * w;
  y.rowwise() += b.row(0);
  return y;
}

template <typename Scalar>
Matrix<Scalar> linear_backward(const Matrix<Scalar>& x, const Matrix<Scalar>& w,
                               const Matrix<Scalar>& dy, Matrix<Scalar>* dw,
                               Matrix<Scalar>* db) {
  dw->noalias() += x.transpose() * dy;
  db->row(0) += dy.colwise().sum();
  return dy * w.transpose();
}

// Row-wise softmax; entries of row i beyond column `limit(i)` are treated
// as masked when `causal` is set (column j is visible to row i iff j <= i).
template <typename Scalar>
Matrix<Scalar> softmax_rows(const Matrix<Scalar>& s, bool causal = false) {
  Matrix<Scalar> p = Matrix<Scalar>::Zero(s.rows(), s.cols());
  for (Eigen::Index i = 0; i < s.rows(); ++i) {
    const Eigen::Index width =
        causal ? std::min<Eigen::Index>(i + 1, s.cols()) : s.cols();
    auto row = s.row(i).head(width);
    const Scalar m = row.maxCoeff();
    auto e = (row.array() - m).exp();
    p.row(i).head(width) = e / e.sum();
  }
  return p;
}

template <typename Scalar>
Matrix<Scalar> log_softmax_rows(const Matrix<Scalar>& s) {
  Matrix<Scalar> out(s.rows(), s.cols());
  for (Eigen::Index i = 0; i < s.rows(); ++i) {
    const Scalar m = s.row(i).maxCoeff();
    const Scalar lse = m + std::log((s.row(i).array() - m).exp().sum());
    out.row(i) = s.row(i).array() - lse;
  }
  return out;
}

// dS = P o (dP - rowsum(P o dP))
template <typename Scalar>
Matrix<Scalar> softmax_rows_backward(const Matrix<Scalar>& p,
                                     const Matrix<Scalar>& dp) {
  Vector<Scalar> dots = (p.array() * dp.array()).rowwise().sum();
  Matrix<Scalar> ds = dp;
  ds.colwise() -= dots;
  return (p.array() * ds.array()).matrix();
}

template <typename Scalar>
Scalar logistic(Scalar z) {
  if (z >= 0) return Scalar(1) / (Scalar(1) + std::exp(-z));
  const Scalar e = std::exp(z);
  return e / (Scalar(1) + e);
}

// log(1 + exp(z)) without overflow.
template <typename Scalar>
Scalar softplus(Scalar z) {
  return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

template <typename Scalar>
Scalar gelu(Scalar z) {
  return Scalar(0.5) * z * (Scalar(1) + std::erf(z / std::numbers::sqrt2_v<Scalar>));
}

template <typename Scalar>
Scalar gelu_grad(Scalar z) {
  const Scalar cdf = Scalar(0.5) * (Scalar(1) + std::erf(z / std::numbers::sqrt2_v<Scalar>));
  const Scalar pdf = std::exp(Scalar(-0.5) * z * z) *
                     std::numbers::inv_sqrtpi_v<Scalar> /
                     std::numbers::sqrt2_v<Scalar>;
  return cdf + z * pdf;
}

template <typename Scalar>
struct LayerNormCache {
  Matrix<Scalar> xhat;
  Vector<Scalar> inv_std;
};

template <typename Scalar>
Matrix<Scalar> layer_norm(const Matrix<Scalar>& x, const Matrix<Scalar>& gamma,
                          const Matrix<Scalar>& beta, LayerNormCache<Scalar>* cache,
                          Scalar eps = Scalar(1e-5)) {
  const Eigen::Index d = x.cols();
  Vector<Scalar> mean = x.rowwise().mean();
  Matrix<Scalar> centered = x.colwise() - mean;
  Vector<Scalar> var = centered.array().square().rowwise().sum() / Scalar(d);
  cache->inv_std = (var.array() + eps).rsqrt();
  cache->xhat = centered.array().colwise() * cache->inv_std.array();
  Matrix<Scalar> y = cache->xhat.array().rowwise() * gamma.row(0).array();
  y.rowwise() += beta.row(0);
  return y;
}

template <typename Scalar>
Matrix<Scalar> layer_norm_backward(const LayerNormCache<Scalar>& cache,
                                   const Matrix<Scalar>& gamma,
                                   const Matrix<Scalar>& dy,
                                   Matrix<Scalar>* dgamma,
                                   Matrix<Scalar>* dbeta) {
  const Scalar d = Scalar(dy.cols());
  dgamma->row(0) += (dy.array() * cache.xhat.array()).colwise().sum().matrix();
  dbeta->row(0) += dy.colwise().sum();
  Matrix<Scalar> dxhat = dy.array().rowwise() * gamma.row(0).array();
  Vector<Scalar> mean_dxhat = dxhat.rowwise().sum() / d;
  Vector<Scalar> mean_dxhat_xhat =
      (dxhat.array() * cache.xhat.array()).rowwise().sum() / d;
  Matrix<Scalar> dx = dxhat;
  dx.colwise() -= mean_dxhat;
  dx -= (cache.xhat.array().colwise() * mean_dxhat_xhat.array()).matrix();
  return dx.array().colwise() * cache.inv_std.array();
}

template <typename Scalar>
struct AttentionParams {
  Matrix<Scalar> wq, bq, wk, bk, wv, bv, wo, bo;
};

template <typename Scalar>
struct AttentionCache {
  Matrix<Scalar> q, k, v;
  std::vector<Matrix<Scalar>> probs;  // one (n x m) matrix per head
  Matrix<Scalar> heads;               // concatenated head outputs (n x d)
};

// Multi-head scaled dot-product attention of queries `xq` over `xkv`.
template <typename Scalar>
Matrix<Scalar> attention(const AttentionParams<Scalar>& p,
                         const Matrix<Scalar>& xq, const Matrix<Scalar>& xkv,
                         int n_heads, bool causal,
                         AttentionCache<Scalar>* cache) {
  const Eigen::Index d = p.wq.cols();
  const Eigen::Index dh = d / n_heads;
  const Scalar scale = Scalar(1) / std::sqrt(Scalar(dh));
  cache->q = linear(xq, p.wq, p.bq);
  cache->k = linear(xkv, p.wk, p.bk);
  cache->v = linear(xkv, p.wv, p.bv);
  cache->probs.resize(n_heads);
  cache->heads.resize(xq.rows(), d);
  for (int h = 0; h < n_heads; ++h) {
    auto qh = cache->q.middleCols(h * dh, dh);
    auto kh = cache->k.middleCols(h * dh, dh);
    auto vh = cache->v.middleCols(h * dh, dh);
    Matrix<Scalar> scores = (qh * kh.transpose()) * scale;
    cache->probs[h] = softmax_rows(scores, causal);
    cache->heads.middleCols(h * dh, dh).noalias() = cache->probs[h] * vh;
  }
  return linear(cache->heads, p.wo, p.bo);
}

// Returns dL/dxq in *dxq and dL/dxkv in *dxkv (both overwritten).
template <typename Scalar>
void attention_backward(const AttentionParams<Scalar>& p,
                        const AttentionCache<Scalar>& cache,
                        const Matrix<Scalar>& xq, const Matrix<Scalar>& xkv,
                        const Matrix<Scalar>& dout, int n_heads,
                        AttentionParams<Scalar>* g, Matrix<Scalar>* dxq,
                        Matrix<Scalar>* dxkv) {
  const Eigen::Index d = p.wq.cols();
  const Eigen::Index dh = d / n_heads;
  const Scalar scale = Scalar(1) / std::sqrt(Scalar(dh));
  Matrix<Scalar> dheads = linear_backward(cache.heads, p.wo, dout, &g->wo, &g->bo);
  Matrix<Scalar> dq(cache.q.rows(), d);
  Matrix<Scalar> dk(cache.k.rows(), d);
  Matrix<Scalar> dv(cache.v.rows(), d);
  for (int h = 0; h < n_heads; ++h) {
    auto qh = cache.q.middleCols(h * dh, dh);
    auto kh = cache.k.middleCols(h * dh, dh);
    auto vh = cache.v.middleCols(h * dh, dh);
    auto dhh = dheads.middleCols(h * dh, dh);
    const Matrix<Scalar>& probs = cache.probs[h];
    Matrix<Scalar> dprobs = dhh * vh.transpose();
    dv.middleCols(h * dh, dh).noalias() = probs.transpose() * dhh;
    Matrix<Scalar> dscores = softmax_rows_backward(probs, dprobs) * scale;
    dq.middleCols(h * dh, dh).noalias() = dscores * kh;
    dk.middleCols(h * dh, dh).noalias() = dscores.transpose() * qh;
  }
  *dxq = linear_backward(xq, p.wq, dq, &g->wq, &g->bq);
  *dxkv = linear_backward(xkv, p.wk, dk, &g->wk, &g->bk);
  *dxkv += linear_backward(xkv, p.wv, dv, &g->wv, &g->bv);
}

template <typename Scalar>
struct FeedForwardParams {
  Matrix<Scalar> w1, b1, w2, b2;
};

template <typename Scalar>
struct FeedForwardCache {
  Matrix<Scalar> pre;  // X W1 + b1
  Matrix<Scalar> act;  // gelu(pre)
};

template <typename Scalar>
Matrix<Scalar> feed_forward(const FeedForwardParams<Scalar>& p,
                            const Matrix<Scalar>& x,
                            FeedForwardCache<Scalar>* cache) {
  cache->pre = linear(x, p.w1, p.b1);
  cache->act = cache->pre.unaryExpr([](Scalar z) { return gelu(z); });
  return linear(cache->act, p.w2, p.b2);
}

template <typename Scalar>
Matrix<Scalar> feed_forward_backward(const FeedForwardParams<Scalar>& p,
                                     const FeedForwardCache<Scalar>& cache,
                                     const Matrix<Scalar>& x,
                                     const Matrix<Scalar>& dout,
                                     FeedForwardParams<Scalar>* g) {
  Matrix<Scalar> dact = linear_backward(cache.act, p.w2, dout, &g->w2, &g->b2);
  Matrix<Scalar> dpre =
      dact.array() *
      cache.pre.unaryExpr([](Scalar z) { return gelu_grad(z); }).array();
  return linear_backward(x, p.w1, dpre, &g->w1, &g->b1);
}

}  // namespace termdialog

#endif  // TERMDIALOG_MODEL_LAYERS_H_
