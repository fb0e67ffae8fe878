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

#include "termdialog/metrics.h"

#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <unordered_set>

#include "termdialog/annotator.h"
#include "termdialog/error.h"
#include "termdialog/text.h"

namespace termdialog {
namespace {

using NgramCounts = std::unordered_map<std::string, long>;

// Joins with a control byte that the tokenizer can never emit inside a token.
std::string ngram_key(const TokenList& tokens, size_t start, int n) {
  std::string key = tokens[start];
  for (int k = 1; k < n; ++k) {
    key += '\x1f';
    key += tokens[start + static_cast<size_t>(k)];
  }
  return key;
}

NgramCounts count_ngrams(const TokenList& tokens, int n) {
  NgramCounts counts;
  if (tokens.size() < static_cast<size_t>(n)) return counts;
  for (size_t i = 0; i + static_cast<size_t>(n) <= tokens.size(); ++i) {
    ++counts[ngram_key(tokens, i, n)];
  }
  return counts;
}

long ngram_total(const TokenList& tokens, int n) {
  return std::max<long>(0, static_cast<long>(tokens.size()) - n + 1);
}

long clipped_overlap(const NgramCounts& cand, const NgramCounts& ref) {
  long overlap = 0;
  for (const auto& [gram, c] : cand) {
    auto it = ref.find(gram);
    if (it != ref.end()) overlap += std::min(c, it->second);
  }
  return overlap;
}

double f1(double p, double r) { return p + r == 0 ? 0.0 : 2 * p * r / (p + r); }

void check_corpus(const std::vector<TokenList>& candidates,
                  const std::vector<TokenList>& references) {
  if (candidates.size() != references.size()) {
    throw ValidationError("candidate and reference counts differ");
  }
  if (candidates.empty()) throw ValidationError("empty evaluation corpus");
}

}  // namespace

double perplexity(std::span<const double> token_nlls) {
  if (token_nlls.empty()) throw ValidationError("perplexity of no tokens");
  double total = 0;
  for (double v : token_nlls) {
    if (!std::isfinite(v)) throw ValidationError("non-finite token NLL");
    total += v;
  }
  return std::exp(total / static_cast<double>(token_nlls.size()));
}

double bleu(const std::vector<TokenList>& candidates,
            const std::vector<TokenList>& references, int n) {
  if (n < 1 || n > 4) throw ValidationError("BLEU order must be in 1..4");
  check_corpus(candidates, references);
  long cand_len = 0, ref_len = 0;
  std::array<long, 4> matches{}, totals{};
  for (size_t i = 0; i < candidates.size(); ++i) {
    cand_len += static_cast<long>(candidates[i].size());
    ref_len += static_cast<long>(references[i].size());
    for (int k = 1; k <= n; ++k) {
      matches[k - 1] += clipped_overlap(count_ngrams(candidates[i], k),
                                        count_ngrams(references[i], k));
      totals[k - 1] += ngram_total(candidates[i], k);
    }
  }
  if (cand_len == 0) return 0.0;
  double log_sum = 0;
  for (int k = 0; k < n; ++k) {
    if (matches[k] == 0 || totals[k] == 0) return 0.0;
    log_sum += std::log(static_cast<double>(matches[k]) / static_cast<double>(totals[k]));
  }
  const double bp = std::exp(std::min(0.0, 1.0 - static_cast<double>(ref_len) /
                                                     static_cast<double>(cand_len)));
  return bp * std::exp(log_sum / n);
}

double rouge_n(const TokenList& candidate, const TokenList& reference, int n) {
  if (n != 1 && n != 2) throw ValidationError("ROUGE-N order must be 1 or 2");
  const long cand_total = ngram_total(candidate, n);
  const long ref_total = ngram_total(reference, n);
  if (cand_total == 0 || ref_total == 0) {
    return cand_total == ref_total && candidate == reference ? 1.0 : 0.0;
  }
  const long overlap =
      clipped_overlap(count_ngrams(candidate, n), count_ngrams(reference, n));
  return f1(static_cast<double>(overlap) / static_cast<double>(cand_total),
            static_cast<double>(overlap) / static_cast<double>(ref_total));
}

double rouge_n(const std::vector<TokenList>& candidates,
               const std::vector<TokenList>& references, int n) {
  check_corpus(candidates, references);
  double total = 0;
  for (size_t i = 0; i < candidates.size(); ++i) {
    total += rouge_n(candidates[i], references[i], n);
  }
  return total / static_cast<double>(candidates.size());
}

size_t lcs_length(const TokenList& a, const TokenList& b) {
  std::vector<size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (size_t i = 1; i <= a.size(); ++i) {
    for (size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

double rouge_l(const TokenList& candidate, const TokenList& reference) {
  if (candidate.empty() || reference.empty()) {
    return candidate.empty() && reference.empty() ? 1.0 : 0.0;
  }
  const auto lcs = static_cast<double>(lcs_length(candidate, reference));
  return f1(lcs / static_cast<double>(candidate.size()),
            lcs / static_cast<double>(reference.size()));
}

double rouge_l(const std::vector<TokenList>& candidates,
               const std::vector<TokenList>& references) {
  check_corpus(candidates, references);
  double total = 0;
  for (size_t i = 0; i < candidates.size(); ++i) {
    total += rouge_l(candidates[i], references[i]);
  }
  return total / static_cast<double>(candidates.size());
}

double distinct_n(const std::vector<TokenList>& responses, int n) {
  if (n < 1 || n > 4) throw ValidationError("Distinct order must be in 1..4");
  std::unordered_set<std::string> unique;
  long total = 0;
  for (const auto& r : responses) {
    if (r.size() < static_cast<size_t>(n)) continue;
    for (size_t i = 0; i + static_cast<size_t>(n) <= r.size(); ++i) {
      unique.insert(ngram_key(r, i, n));
      ++total;
    }
  }
  if (total == 0) {
    throw ValidationError("no " + std::to_string(n) + "-grams in the responses");
  }
  return static_cast<double>(unique.size()) / static_cast<double>(total);
}

std::string strip_markers(std::string_view text) {
  std::string out(text);
  size_t pos = 0;
  while ((pos = out.find(kTermMarker, pos)) != std::string::npos) {
    out.replace(pos, kTermMarker.size(), " ");
  }
  return out;
}

TokenList metric_tokens(std::string_view text) {
  TokenList out;
  for (auto& tok : tokenize(strip_markers(text))) out.push_back(std::move(tok.normalized));
  return out;
}

DistinctTerms distinct_terms(const std::vector<std::string>& responses,
                             const Lexicon& lex) {
  DistinctTerms result;
  for (const auto& response : responses) {
    const AnnotatedSequence seq = annotate(strip_markers(response), lex);
    for (const auto& span : seq.spans) {
      std::string phrase;
      for (size_t i = span.start; i < span.end; ++i) {
        if (i > span.start) phrase += ' ';
        phrase += seq.tokens[i].normalized;
      }
      result.terms.insert(std::move(phrase));
    }
  }
  result.count = result.terms.size();
  return result;
}

MetricReport evaluate_run(const std::vector<std::string>& candidates,
                          const std::vector<std::string>& references,
                          std::span<const double> token_nlls,
                          const Lexicon& lex) {
  std::vector<TokenList> cand, ref;
  for (const auto& c : candidates) cand.push_back(metric_tokens(c));
  for (const auto& r : references) ref.push_back(metric_tokens(r));
  check_corpus(cand, ref);

  MetricReport report;
  report.n_responses = cand.size();
  if (!token_nlls.empty()) report.ppl = perplexity(token_nlls);
  for (int n = 1; n <= 4; ++n) {
    report.bleu[n - 1] = bleu(cand, ref, n);
    report.distinct[n - 1] = distinct_n(cand, n);
  }
  report.rouge_1 = rouge_n(cand, ref, 1);
  report.rouge_2 = rouge_n(cand, ref, 2);
  report.rouge_l = rouge_l(cand, ref);
  DistinctTerms terms = distinct_terms(candidates, lex);
  report.distinct_term_count = terms.count;
  report.distinct_term_set = std::move(terms.terms);
  return report;
}

}  // namespace termdialog
