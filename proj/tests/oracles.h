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

// Independent reference implementations used only by tests. They favour
// obviousness over speed and share no code with the library beyond plain
// data types.

#ifndef TERMDIALOG_TESTS_ORACLES_H_
#define TERMDIALOG_TESTS_ORACLES_H_

#include <algorithm>
#include <cctype>
#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace oracle {

using Words = std::vector<std::string>;

inline bool space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
inline bool punct(char c) { return std::ispunct(static_cast<unsigned char>(c)) != 0; }

inline std::string lower(const std::string& s) {
  std::string out;
  for (char c : s) {
    out += (static_cast<unsigned char>(c) < 0x80)
               ? static_cast<char>(std::tolower(static_cast<unsigned char>(c)))
               : c;
  }
  return out;
}

struct Tok {
  std::string text;
  bool is_punct;
};

// Whitespace split, then peel punctuation characters off both ends.
inline std::vector<Tok> tokenize(const std::string& text) {
  std::vector<Tok> out;
  std::string chunk;
  auto emit = [&] {
    if (chunk.empty()) return;
    size_t a = 0, b = chunk.size();
    while (a < b && punct(chunk[a])) ++a;
    while (b > a && punct(chunk[b - 1])) --b;
    for (size_t i = 0; i < a; ++i) out.push_back({std::string(1, chunk[i]), true});
    if (b > a) out.push_back({chunk.substr(a, b - a), false});
    for (size_t i = b; i < chunk.size(); ++i) out.push_back({std::string(1, chunk[i]), true});
    chunk.clear();
  };
  for (char c : text) {
    if (space(c)) {
      emit();
    } else {
      chunk += c;
    }
  }
  emit();
  return out;
}

// Linear scan over the raw term list.
class NaiveLexicon {
 public:
  explicit NaiveLexicon(std::vector<std::string> terms) {
    for (auto& t : terms) {
      size_t a = 0, b = t.size();
      while (a < b && space(t[a])) ++a;
      while (b > a && space(t[b - 1])) --b;
      if (b > a) terms_.push_back(lower(t.substr(a, b - a)));
    }
  }

  bool has(const std::string& w) const {
    for (const auto& t : terms_) {
      if (t == w) return true;
    }
    return false;
  }

  bool matches(const std::string& token) const {
    const std::string w = lower(token);
    if (has(w)) return true;
    std::string piece;
    for (size_t i = 0; i <= w.size(); ++i) {
      if (i == w.size() || w[i] == '-') {
        if (!piece.empty() && has(piece)) return true;
        piece.clear();
      } else {
        piece += w[i];
      }
    }
    return false;
  }

  size_t distinct() const { return std::set<std::string>(terms_.begin(), terms_.end()).size(); }

 private:
  std::vector<std::string> terms_;
};

struct Annotation {
  std::vector<std::pair<size_t, size_t>> spans;
  std::string flattened;
  std::vector<int> labels;
};

// Mark every matching word, then insert a marker at each marked token whose
// left neighbour is unmarked.
inline Annotation mark_and_merge(const std::string& text, const NaiveLexicon& lex) {
  const std::vector<Tok> toks = tokenize(text);
  std::vector<int> marked(toks.size(), 0);
  for (size_t i = 0; i < toks.size(); ++i) {
    marked[i] = !toks[i].is_punct && lex.matches(toks[i].text);
  }
  Annotation a;
  a.labels = marked;
  Words flat;
  for (size_t i = 0; i < toks.size(); ++i) {
    if (marked[i] && (i == 0 || !marked[i - 1])) {
      size_t j = i;
      while (j < toks.size() && marked[j]) ++j;
      a.spans.push_back({i, j});
      flat.push_back("[TERM]");
    }
    flat.push_back(toks[i].text);
  }
  for (size_t i = 0; i < flat.size(); ++i) a.flattened += (i ? " " : "") + flat[i];
  return a;
}

// ---- metrics -------------------------------------------------------------

inline std::map<Words, int> ngram_counts(const Words& w, int n) {
  std::map<Words, int> counts;
  for (int i = 0; i + n <= static_cast<int>(w.size()); ++i) {
    counts[Words(w.begin() + i, w.begin() + i + n)]++;
  }
  return counts;
}

inline double bleu(const std::vector<Words>& cands, const std::vector<Words>& refs, int max_n) {
  double log_sum = 0;
  for (int n = 1; n <= max_n; ++n) {
    long matched = 0, total = 0;
    for (size_t k = 0; k < cands.size(); ++k) {
      const auto c = ngram_counts(cands[k], n);
      const auto r = ngram_counts(refs[k], n);
      for (const auto& [g, cnt] : c) {
        total += cnt;
        auto it = r.find(g);
        if (it != r.end()) matched += std::min(cnt, it->second);
      }
    }
    if (matched == 0 || total == 0) return 0.0;
    log_sum += std::log(static_cast<double>(matched) / total) / max_n;
  }
  double c = 0, r = 0;
  for (size_t k = 0; k < cands.size(); ++k) {
    c += cands[k].size();
    r += refs[k].size();
  }
  const double bp = c >= r ? 1.0 : std::exp(1.0 - r / c);
  return bp * std::exp(log_sum);
}

// Two sides with nothing to count score 1 only when they are identical.
inline double f1(double overlap, double cand_total, double ref_total, bool identical) {
  if (cand_total == 0 || ref_total == 0) return cand_total == ref_total && identical ? 1.0 : 0.0;
  if (overlap == 0) return 0.0;
  const double p = overlap / cand_total, r = overlap / ref_total;
  return 2 * p * r / (p + r);
}

inline double rouge_n(const Words& c, const Words& r, int n) {
  const auto cc = ngram_counts(c, n), rc = ngram_counts(r, n);
  double overlap = 0, ct = 0, rt = 0;
  for (const auto& [g, k] : cc) {
    ct += k;
    if (rc.count(g)) overlap += std::min(k, rc.at(g));
  }
  for (const auto& [g, k] : rc) rt += k;
  return f1(overlap, ct, rt, c == r);
}

// Memoized recursion rather than the bottom-up table.
inline size_t lcs(const Words& a, const Words& b) {
  std::map<std::pair<size_t, size_t>, size_t> memo;
  std::function<size_t(size_t, size_t)> go = [&](size_t i, size_t j) -> size_t {
    if (i == a.size() || j == b.size()) return 0;
    auto key = std::make_pair(i, j);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    size_t v = a[i] == b[j] ? 1 + go(i + 1, j + 1) : std::max(go(i + 1, j), go(i, j + 1));
    return memo[key] = v;
  };
  return go(0, 0);
}

inline double rouge_l(const Words& c, const Words& r) {
  return f1(static_cast<double>(lcs(c, r)), c.size(), r.size(), c == r);
}

inline double distinct(const std::vector<Words>& responses, int n) {
  std::set<Words> unique;
  double total = 0;
  for (const auto& w : responses) {
    for (const auto& [g, k] : ngram_counts(w, n)) {
      unique.insert(g);
      total += k;
    }
  }
  return unique.size() / total;
}

// ---- corpus --------------------------------------------------------------

// Counts doctor turns that have something before them.
inline size_t doctor_turns(const std::vector<std::string>& speakers) {
  size_t n = 0;
  for (size_t i = 1; i < speakers.size(); ++i) {
    n += speakers[i] == "doctor" && speakers[i - 1] != "doctor";
  }
  return n;
}

inline size_t word_tokens(const std::string& text) {
  size_t n = 0;
  for (const auto& t : tokenize(text)) n += !t.is_punct;
  return n;
}

// Frequency-sorted vocabulary via a hash map.
inline std::vector<std::string> vocab(const std::vector<Words>& corpus, int min_freq) {
  std::unordered_map<std::string, int> freq;
  for (const auto& s : corpus) {
    for (const auto& w : s) {
      if (w != "[TERM]") freq[w]++;
    }
  }
  std::vector<std::pair<std::string, int>> items(freq.begin(), freq.end());
  std::sort(items.begin(), items.end(), [](const auto& x, const auto& y) {
    return x.second != y.second ? x.second > y.second : x.first < y.first;
  });
  std::vector<std::string> out = {"<pad>", "<s>", "</s>", "<unk>", "[TERM]"};
  for (const auto& [w, f] : items) {
    if (f >= min_freq) out.push_back(w);
  }
  return out;
}

}  // namespace oracle

#endif  // TERMDIALOG_TESTS_ORACLES_H_
