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

#include "termdialog/annotator.h"

#include "termdialog/error.h"
#include "termdialog/parallel.h"
#include "termdialog/text.h"

namespace termdialog {
namespace {

void push_token(std::string_view text, size_t begin, size_t end, bool punct,
                std::vector<Token>* out) {
  Token tok;
  tok.surface.assign(text.substr(begin, end - begin));
  tok.normalized = to_lower(tok.surface);
  tok.is_punct = punct;
  tok.offset = begin;
  out->push_back(std::move(tok));
}

}  // namespace

std::string AnnotatedSequence::flattened_text() const {
  return join(flattened, " ");
}

size_t AnnotatedSequence::marker_count() const {
  size_t count = 0;
  for (const auto& s : flattened) count += (s == kTermMarker);
  return count;
}

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> tokens;
  size_t i = 0;
  const size_t n = text.size();
  while (i < n) {
    while (i < n && is_ascii_space(text[i])) ++i;
    const size_t chunk_begin = i;
    while (i < n && !is_ascii_space(text[i])) ++i;
    const size_t chunk_end = i;
    if (chunk_end == chunk_begin) continue;

    size_t core_begin = chunk_begin;
    while (core_begin < chunk_end && is_ascii_punct(text[core_begin])) {
      ++core_begin;
    }
    size_t core_end = chunk_end;
    while (core_end > core_begin && is_ascii_punct(text[core_end - 1])) {
      --core_end;
    }
    for (size_t k = chunk_begin; k < core_begin; ++k) {
      push_token(text, k, k + 1, true, &tokens);
    }
    if (core_end > core_begin) {
      push_token(text, core_begin, core_end, false, &tokens);
    }
    for (size_t k = core_end; k < chunk_end; ++k) {
      push_token(text, k, k + 1, true, &tokens);
    }
  }
  return tokens;
}

std::vector<TermSpan> identify(const std::vector<Token>& tokens,
                               const Lexicon& lex) {
  std::vector<TermSpan> spans;
  size_t i = 0;
  while (i < tokens.size()) {
    if (tokens[i].is_punct || !lex.contains(tokens[i].normalized)) {
      ++i;
      continue;
    }
    const size_t start = i;
    while (i < tokens.size() && !tokens[i].is_punct &&
           lex.contains(tokens[i].normalized)) {
      ++i;
    }
    spans.push_back({start, i});
  }
  return spans;
}

AnnotatedSequence flatten(std::vector<Token> tokens,
                          const std::vector<TermSpan>& spans) {
  size_t prev_end = 0;
  for (const auto& span : spans) {
    if (span.start >= span.end) {
      throw ValidationError("empty or inverted term span");
    }
    if (span.end > tokens.size()) {
      throw ValidationError("term span out of range");
    }
    if (span.start < prev_end) {
      throw ValidationError("term spans overlap or are unsorted");
    }
    prev_end = span.end;
  }

  AnnotatedSequence seq;
  seq.labels.assign(tokens.size(), 0);
  seq.flattened.reserve(tokens.size() + spans.size());
  size_t next = 0;
  for (size_t i = 0; i < tokens.size(); ++i) {
    if (next < spans.size() && spans[next].start == i) {
      seq.flattened.emplace_back(kTermMarker);
    }
    if (next < spans.size() && i >= spans[next].start && i < spans[next].end) {
      seq.labels[i] = 1;
      if (i + 1 == spans[next].end) ++next;
    }
    seq.flattened.push_back(tokens[i].surface);
  }
  seq.tokens = std::move(tokens);
  seq.spans = spans;
  return seq;
}

AnnotatedSequence annotate(std::string_view text, const Lexicon& lex) {
  if (text.find(kTermMarker) != std::string_view::npos) {
    throw ValidationError("input already contains the " +
                          std::string(kTermMarker) + " marker");
  }
  std::vector<Token> tokens = tokenize(text);
  std::vector<TermSpan> spans = identify(tokens, lex);
  return flatten(std::move(tokens), spans);
}

std::vector<AnnotatedPair> annotate_corpus(
    const std::vector<DialoguePair>& pairs, const Lexicon& lex,
    int num_threads) {
  std::vector<AnnotatedPair> out(pairs.size());
  parallel_for(pairs.size(), num_threads, [&](size_t i) {
    const DialoguePair& pair = pairs[i];
    AnnotatedPair& rec = out[i];
    rec.id = pair.id;
    rec.src_text = join_utterances(pair.input_utterances);
    rec.tgt_text = join_utterances(pair.target_utterances);
    rec.src_utterances = pair.input_utterances.size();
    rec.tgt_utterances = pair.target_utterances.size();
    try {
      rec.src = annotate(rec.src_text, lex);
      rec.tgt = annotate(rec.tgt_text, lex);
    } catch (const ValidationError& e) {
      throw ValidationError("pair " + pair.id + ": " + e.what());
    }
  });
  return out;
}

}  // namespace termdialog
