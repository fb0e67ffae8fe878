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

#ifndef TERMDIALOG_MODEL_DECODE_H_
#define TERMDIALOG_MODEL_DECODE_H_

#include <span>
#include <vector>

#include "termdialog/model/transformer.h"

namespace termdialog {

struct DecodeStrategy {
  enum class Kind { kGreedy, kBeam };
  Kind kind = Kind::kGreedy;
  int beam_size = 1;

  static DecodeStrategy greedy() { return {}; }
  static DecodeStrategy beam(int k) { return {Kind::kBeam, k}; }
};

// Autoregressive decoding from BOS. Stops at EOS or after max_new tokens.
// The returned ids exclude BOS and EOS. Greedy ties go to the lowest id;
// beam search ranks finished hypotheses by mean log-probability per token.
template <typename Scalar>
std::vector<int> generate(const Seq2SeqModel<Scalar>& model,
                          std::span<const int> src_ids, int max_new,
                          const DecodeStrategy& strategy);

extern template std::vector<int> generate<double>(const Seq2SeqModel<double>&,
                                                  std::span<const int>, int,
                                                  const DecodeStrategy&);
extern template std::vector<int> generate<float>(const Seq2SeqModel<float>&,
                                                 std::span<const int>, int,
                                                 const DecodeStrategy&);

}  // namespace termdialog

#endif  // TERMDIALOG_MODEL_DECODE_H_
