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

#ifndef TERMDIALOG_ANNOTATOR_H_
#define TERMDIALOG_ANNOTATOR_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "termdialog/dialogue.h"
#include "termdialog/lexicon.h"

namespace termdialog {

inline constexpr std::string_view kTermMarker = "[TERM]";

struct Token {
  std::string surface;
  std::string normalized;
  bool is_punct = false;
  // Byte offset of the surface in the tokenized text.
  size_t offset = 0;

  bool operator==(const Token&) const = default;
};

// Half-open token range [start, end) covering one terminology phrase.
struct TermSpan {
  size_t start = 0;
  size_t end = 0;

  size_t length() const { return end - start; }
  bool operator==(const TermSpan&) const = default;
};

struct AnnotatedSequence {
  std::vector<Token> tokens;
  std::vector<TermSpan> spans;
  // Token surfaces with one marker before each span.
  std::vector<std::string> flattened;
  // e_i: 1 iff token i lies inside a span.
  std::vector<uint8_t> labels;

  std::string flattened_text() const;
  size_t marker_count() const;

  bool operator==(const AnnotatedSequence&) const = default;
};

// Whitespace split; leading and trailing ASCII punctuation characters become
// separate single-character punctuation tokens. Internal punctuation
// ("x-ray", "don't") stays inside the word.
std::vector<Token> tokenize(std::string_view text);

// Marks word tokens found in the lexicon and merges maximal runs of adjacent
// marked tokens into spans. Punctuation is never marked, so it breaks runs.
std::vector<TermSpan> identify(const std::vector<Token>& tokens,
                               const Lexicon& lex);

// Inserts the marker before each span. Throws ValidationError on empty,
// out-of-range, unsorted or overlapping spans.
AnnotatedSequence flatten(std::vector<Token> tokens,
                          const std::vector<TermSpan>& spans);

// flatten(tokenize(text), identify(...)). Throws ValidationError if the text
// already contains the marker.
AnnotatedSequence annotate(std::string_view text, const Lexicon& lex);

struct AnnotatedPair {
  std::string id;
  std::string src_text;
  std::string tgt_text;
  AnnotatedSequence src;
  AnnotatedSequence tgt;
  size_t src_utterances = 0;
  size_t tgt_utterances = 0;
};

// Annotates X and Y of every pair. Output order equals input order for any
// thread count; num_threads <= 1 runs inline.
std::vector<AnnotatedPair> annotate_corpus(
    const std::vector<DialoguePair>& pairs, const Lexicon& lex,
    int num_threads = 1);

}  // namespace termdialog

#endif  // TERMDIALOG_ANNOTATOR_H_
