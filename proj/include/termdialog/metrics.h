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

#ifndef TERMDIALOG_METRICS_H_
#define TERMDIALOG_METRICS_H_

#include <array>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "termdialog/lexicon.h"

namespace termdialog {

using TokenList = std::vector<std::string>;

// All metrics are pure functions returning values in [0, 1] (perplexity
// excepted). Corpus-level scores pool integer counts before dividing.

// exp(mean(token_nlls)). Throws ValidationError on empty or non-finite input.
double perplexity(std::span<const double> token_nlls);

// Corpus BLEU with uniform weights over orders 1..n: clipped n-gram
// precisions pooled across the corpus, geometric mean, times the brevity
// penalty exp(min(0, 1 - r/c)). No smoothing, so any zero precision gives 0.
// One reference per candidate. Throws ValidationError for n outside 1..4,
// an empty corpus, or mismatched list sizes.
double bleu(const std::vector<TokenList>& candidates,
            const std::vector<TokenList>& references, int n);

// ROUGE-N F1 of clipped n-gram overlap, n in {1, 2}.
double rouge_n(const TokenList& candidate, const TokenList& reference, int n);
// Mean of per-pair ROUGE-N F1.
double rouge_n(const std::vector<TokenList>& candidates,
               const std::vector<TokenList>& references, int n);

// LCS-based F1.
double rouge_l(const TokenList& candidate, const TokenList& reference);
double rouge_l(const std::vector<TokenList>& candidates,
               const std::vector<TokenList>& references);

size_t lcs_length(const TokenList& a, const TokenList& b);

// Unique n-grams over total n-grams across all responses. Throws
// ValidationError if no response has n tokens.
double distinct_n(const std::vector<TokenList>& responses, int n);

struct DistinctTerms {
  size_t count = 0;
  std::set<std::string> terms;
};

// Distinct normalized terminology phrases found by the annotator.
DistinctTerms distinct_terms(const std::vector<std::string>& responses,
                             const Lexicon& lex);

// Replaces every marker occurrence with a space.
std::string strip_markers(std::string_view text);

// Marker-free, lowercased token surfaces used by every text metric.
TokenList metric_tokens(std::string_view text);

struct MetricReport {
  std::optional<double> ppl;
  std::array<double, 4> bleu{};      // B-1..B-4
  double rouge_1 = 0;
  double rouge_2 = 0;
  double rouge_l = 0;
  std::array<double, 4> distinct{};  // Dist-1..Dist-4
  size_t distinct_term_count = 0;
  std::set<std::string> distinct_term_set;
  size_t n_responses = 0;
};

// Strips markers, tokenizes, and assembles every metric. token_nlls, when
// non-empty, are pooled into the perplexity.
MetricReport evaluate_run(const std::vector<std::string>& candidates,
                          const std::vector<std::string>& references,
                          std::span<const double> token_nlls,
                          const Lexicon& lex);

}  // namespace termdialog

#endif  // TERMDIALOG_METRICS_H_
