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

#include "termdialog/model/decode.h"

#include <algorithm>
#include <tuple>

#include "termdialog/error.h"
#include "termdialog/vocab.h"

namespace termdialog {
namespace {

template <typename Scalar>
Eigen::Index argmax(const Eigen::Ref<const RowVector<Scalar>>& row) {
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < row.size(); ++i) {
    if (row(i) > row(best)) best = i;
  }
  return best;
}

struct Hypothesis {
  std::vector<int> ids;  // starts with BOS
  double log_prob = 0;
};

double normalized(const Hypothesis& h) {
  // ids.size() - 1 generated tokens (BOS excluded).
  return h.log_prob / static_cast<double>(std::max<size_t>(h.ids.size() - 1, 1));
}

template <typename Scalar>
std::vector<int> beam_search(const Seq2SeqModel<Scalar>& model,
                             const Matrix<Scalar>& features, int max_new, int k) {
  std::vector<Hypothesis> active = {{{Vocab::kBos}, 0.0}};
  std::vector<Hypothesis> finished;
  const int max_len = model.config().max_len;
  for (int step = 0; step < max_new && !active.empty(); ++step) {
    if (static_cast<int>(active.front().ids.size()) > max_len) break;
    // (score, hypothesis index, token) sorted best first; ties to earlier
    // hypotheses then lower ids.
    std::vector<std::tuple<double, size_t, int>> candidates;
    for (size_t h = 0; h < active.size(); ++h) {
      const Matrix<Scalar> logits = model.decode_logits(features, active[h].ids);
      const Matrix<Scalar> last = logits.bottomRows(1);
      const Matrix<Scalar> lp = log_softmax_rows(last);
      for (Eigen::Index v = 0; v < lp.cols(); ++v) {
        if (v == Vocab::kPad || v == Vocab::kBos) continue;
        candidates.emplace_back(active[h].log_prob + static_cast<double>(lp(0, v)),
                                h, static_cast<int>(v));
      }
    }
    const size_t keep = std::min<size_t>(static_cast<size_t>(k), candidates.size());
    std::partial_sort(candidates.begin(), candidates.begin() + static_cast<long>(keep),
                      candidates.end(), [](const auto& a, const auto& b) {
                        if (std::get<0>(a) != std::get<0>(b)) {
                          return std::get<0>(a) > std::get<0>(b);
                        }
                        if (std::get<1>(a) != std::get<1>(b)) {
                          return std::get<1>(a) < std::get<1>(b);
                        }
                        return std::get<2>(a) < std::get<2>(b);
                      });
    std::vector<Hypothesis> next;
    for (size_t c = 0; c < keep; ++c) {
      const auto& [score, h, token] = candidates[c];
      Hypothesis hyp{active[h].ids, score};
      hyp.ids.push_back(token);
      if (token == Vocab::kEos) {
        finished.push_back(std::move(hyp));
      } else {
        next.push_back(std::move(hyp));
      }
    }
    active = std::move(next);
    if (static_cast<int>(finished.size()) >= k) break;
  }
  for (auto& h : active) finished.push_back(std::move(h));
  if (finished.empty()) return {};
  const Hypothesis* best = &finished.front();
  for (const auto& h : finished) {
    if (normalized(h) > normalized(*best)) best = &h;
  }
  std::vector<int> out(best->ids.begin() + 1, best->ids.end());
  if (!out.empty() && out.back() == Vocab::kEos) out.pop_back();
  return out;
}

}  // namespace

template <typename Scalar>
std::vector<int> generate(const Seq2SeqModel<Scalar>& model,
                          std::span<const int> src_ids, int max_new,
                          const DecodeStrategy& strategy) {
  if (max_new <= 0) return {};
  const Matrix<Scalar> features = model.encode(src_ids);
  // The decoder input may hold at most max_len positions.
  max_new = std::min(max_new, model.config().max_len);
  if (strategy.kind == DecodeStrategy::Kind::kBeam) {
    if (strategy.beam_size < 1) throw ConfigError("beam size must be >= 1");
    return beam_search(model, features, max_new, strategy.beam_size);
  }
  std::vector<int> prefix = {Vocab::kBos};
  for (int step = 0; step < max_new; ++step) {
    const Matrix<Scalar> logits = model.decode_logits(features, prefix);
    RowVector<Scalar> last = logits.bottomRows(1);
    last(Vocab::kPad) = -std::numeric_limits<Scalar>::infinity();
    last(Vocab::kBos) = -std::numeric_limits<Scalar>::infinity();
    const int token = static_cast<int>(argmax<Scalar>(last));
    if (token == Vocab::kEos) break;
    prefix.push_back(token);
  }
  return std::vector<int>(prefix.begin() + 1, prefix.end());
}

template std::vector<int> generate<double>(const Seq2SeqModel<double>&,
                                           std::span<const int>, int,
                                           const DecodeStrategy&);
template std::vector<int> generate<float>(const Seq2SeqModel<float>&,
                                          std::span<const int>, int,
                                          const DecodeStrategy&);

}  // namespace termdialog
