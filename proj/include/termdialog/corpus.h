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

#ifndef TERMDIALOG_CORPUS_H_
#define TERMDIALOG_CORPUS_H_

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "termdialog/annotator.h"
#include "termdialog/dialogue.h"
#include "termdialog/lexicon.h"

namespace termdialog {

struct ParseResult {
  std::vector<DialoguePair> pairs;
  size_t dialogues = 0;
  size_t skipped_lines = 0;
};

// Reads a JSON-lines dump of {id, utterances: [{speaker, text}, ...]}.
// Consecutive utterances from the same speaker form one turn; every doctor
// turn with at least one preceding utterance yields a pair whose X is all
// preceding utterances. Malformed lines are skipped and counted. Throws
// LoadError if the file cannot be read.
ParseResult parse_raw(const std::string& path);

// Same as parse_raw over in-memory lines; `line` is one JSON object.
// Returns false if the line is malformed.
bool parse_raw_line(const std::string& line, std::vector<DialoguePair>* out);

struct FilterConfig {
  size_t max_src_tokens = 512;
  size_t max_tgt_tokens = 512;
  size_t min_tokens = 2;
};

// Truncates X to its most recent max_src_tokens tokens (whole utterances
// first, then leading tokens of the oldest remaining one) and Y to its first
// max_tgt_tokens tokens, then drops pairs whose X or Y holds fewer than
// min_tokens word (non-punctuation) tokens. Order is preserved.
std::vector<DialoguePair> filter_and_truncate(
    const std::vector<DialoguePair>& pairs, const FilterConfig& config);

struct SplitRatios {
  double train = 0.9;
  double val = 0.05;
  double test = 0.05;
};

struct Splits {
  std::vector<DialoguePair> train;
  std::vector<DialoguePair> val;
  std::vector<DialoguePair> test;
};

// Sizes of the val and test parts are floor(n * ratio); train takes the
// remainder. Throws ConfigError unless ratios are non-negative and sum to 1
// within 1e-9.
std::array<size_t, 3> split_sizes(size_t n, const SplitRatios& ratios);

// Seeded Fisher-Yates shuffle, then cut into train/val/test.
Splits split(std::vector<DialoguePair> pairs, const SplitRatios& ratios,
             uint64_t seed);

// Table-1 style statistics. Totals are integers so accumulation is
// associative; averages are derived per dialogue pair.
struct CorpusStats {
  uint64_t n_dialogues = 0;
  uint64_t words_in = 0;
  uint64_t words_out = 0;
  uint64_t utts_in = 0;
  uint64_t utts_out = 0;
  uint64_t terms_in = 0;
  uint64_t terms_out = 0;

  uint64_t n_words() const { return words_in + words_out; }
  uint64_t n_term_words() const { return terms_in + terms_out; }
  double avg_words_in() const { return average(words_in); }
  double avg_utts_in() const { return average(utts_in); }
  double avg_terms_in() const { return average(terms_in); }
  double avg_words_out() const { return average(words_out); }
  double avg_utts_out() const { return average(utts_out); }
  double avg_terms_out() const { return average(terms_out); }

  CorpusStats& operator+=(const CorpusStats& other);
  bool operator==(const CorpusStats&) const = default;

 private:
  double average(uint64_t total) const {
    return n_dialogues == 0 ? 0.0
                            : static_cast<double>(total) /
                                  static_cast<double>(n_dialogues);
  }
};

CorpusStats operator+(CorpusStats a, const CorpusStats& b);

// Words exclude punctuation tokens; term words are tokens covered by spans.
CorpusStats compute_stats(const std::vector<DialoguePair>& pairs,
                          const Lexicon& lex);
CorpusStats compute_stats(const std::vector<AnnotatedPair>& pairs);

// Row labels in table order.
const std::vector<std::string>& stats_row_labels();

// Aligned plain-text table with one column per named split.
std::string format_stats_table(
    const std::vector<std::pair<std::string, CorpusStats>>& columns);

}  // namespace termdialog

#endif  // TERMDIALOG_CORPUS_H_
