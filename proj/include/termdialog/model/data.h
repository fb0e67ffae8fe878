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

#ifndef TERMDIALOG_MODEL_DATA_H_
#define TERMDIALOG_MODEL_DATA_H_

#include <string>
#include <vector>

#include "termdialog/annotator.h"
#include "termdialog/model/transformer.h"
#include "termdialog/vocab.h"

namespace termdialog {

// Lowercased flattened sequence; the marker stays verbatim.
std::vector<std::string> model_tokens(const AnnotatedSequence& seq);

struct ExampleOptions {
  int max_len = 128;
  // Include marker positions in the classifier loss (labelled 1). Off by
  // default because the marker itself reveals the answer for the next token.
  bool classify_on_markers = false;
};

// Source keeps its last max_len tokens (the most recent turns). Target keeps
// its first max_len - 1 tokens so that BOS + Y fits the decoder.
Example make_example(const AnnotatedPair& pair, const Vocab& vocab,
                     const ExampleOptions& options);

std::vector<Example> make_examples(const std::vector<AnnotatedPair>& pairs,
                                   const Vocab& vocab,
                                   const ExampleOptions& options);

// Vocabulary over the model tokens of both sides of every pair.
Vocab build_vocab(const std::vector<AnnotatedPair>& pairs, int min_freq);

// Drops special tokens (including markers) and joins with spaces.
std::string detokenize(const std::vector<int>& ids, const Vocab& vocab);

}  // namespace termdialog

#endif  // TERMDIALOG_MODEL_DATA_H_
