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

#include "termdialog/corpus.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "termdialog/error.h"
#include "termdialog/random.h"
#include "termdialog/text.h"

namespace termdialog {
namespace {

size_t word_count(const std::vector<Token>& tokens) {
  size_t n = 0;
  for (const auto& t : tokens) n += !t.is_punct;
  return n;
}

size_t word_count(const std::vector<Utterance>& utterances) {
  size_t n = 0;
  for (const auto& u : utterances) n += word_count(tokenize(u.text));
  return n;
}

bool parse_speaker(const std::string& raw, Speaker* out) {
  const std::string s = normalize_term(raw);
  if (s == "patient") {
    *out = Speaker::kPatient;
  } else if (s == "doctor") {
    *out = Speaker::kDoctor;
  } else {
    return false;
  }
  return true;
}

void truncate_source(std::vector<Utterance>* utts, size_t max_tokens) {
  std::vector<size_t> counts;
  size_t total = 0;
  for (const auto& u : *utts) {
    counts.push_back(tokenize(u.text).size());
    total += counts.back();
  }
  size_t drop = 0;
  while (total > max_tokens && utts->size() - drop > 1) {
    total -= counts[drop];
    ++drop;
  }
  utts->erase(utts->begin(), utts->begin() + static_cast<long>(drop));
  if (total > max_tokens) {
    Utterance& oldest = utts->front();
    const std::vector<Token> tokens = tokenize(oldest.text);
    const size_t keep_from = tokens.size() - max_tokens;
    oldest.text = max_tokens == 0 ? std::string()
                                  : oldest.text.substr(tokens[keep_from].offset);
  }
}

void truncate_target(std::vector<Utterance>* utts, size_t max_tokens) {
  size_t budget = max_tokens;
  size_t keep = 0;
  for (; keep < utts->size(); ++keep) {
    if (budget == 0) break;
    Utterance& u = (*utts)[keep];
    const std::vector<Token> tokens = tokenize(u.text);
    if (tokens.size() > budget) {
      const Token& last = tokens[budget - 1];
      u.text = u.text.substr(0, last.offset + last.surface.size());
      budget = 0;
      ++keep;
      break;
    }
    budget -= tokens.size();
  }
  utts->resize(keep);
}

void accumulate(const AnnotatedSequence& seq, uint64_t* words,
                uint64_t* terms) {
  *words += word_count(seq.tokens);
  for (const auto& span : seq.spans) *terms += span.length();
}

}  // namespace

std::string join_utterances(const std::vector<Utterance>& utterances) {
  std::string out;
  for (size_t i = 0; i < utterances.size(); ++i) {
    if (i > 0) out += '\n';
    out += utterances[i].text;
  }
  return out;
}

std::vector<Utterance> split_utterances(const std::string& text,
                                        Speaker speaker) {
  std::vector<Utterance> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!trim(line).empty()) out.push_back({speaker, line});
  }
  return out;
}

bool parse_raw_line(const std::string& line, std::vector<DialoguePair>* out) {
  nlohmann::json doc = nlohmann::json::parse(line, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) return false;
  auto id_it = doc.find("id");
  auto utts_it = doc.find("utterances");
  if (id_it == doc.end() || utts_it == doc.end() || !utts_it->is_array()) {
    return false;
  }
  std::string id;
  if (id_it->is_string()) {
    id = id_it->get<std::string>();
  } else if (id_it->is_number_integer()) {
    id = std::to_string(id_it->get<long long>());
  } else {
    return false;
  }

  std::vector<Utterance> utts;
  for (const auto& u : *utts_it) {
    if (!u.is_object()) return false;
    auto sp = u.find("speaker");
    auto tx = u.find("text");
    if (sp == u.end() || tx == u.end() || !sp->is_string() || !tx->is_string()) {
      return false;
    }
    Utterance utt;
    if (!parse_speaker(sp->get<std::string>(), &utt.speaker)) return false;
    utt.text = std::string(trim(tx->get<std::string>()));
    if (utt.text.empty() || !is_valid_utf8(utt.text)) return false;
    utts.push_back(std::move(utt));
  }

  size_t pair_index = 0;
  size_t i = 0;
  while (i < utts.size()) {
    size_t j = i;
    while (j < utts.size() && utts[j].speaker == utts[i].speaker) ++j;
    if (utts[i].speaker == Speaker::kDoctor && i > 0) {
      DialoguePair pair;
      pair.id = id + "#" + std::to_string(pair_index++);
      pair.input_utterances.assign(utts.begin(), utts.begin() + i);
      pair.target_utterances.assign(utts.begin() + i, utts.begin() + j);
      out->push_back(std::move(pair));
    }
    i = j;
  }
  return true;
}

ParseResult parse_raw(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot open raw dialogue file: " + path);
  ParseResult result;
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    if (parse_raw_line(line, &result.pairs)) {
      ++result.dialogues;
    } else {
      ++result.skipped_lines;
    }
  }
  if (in.bad()) throw LoadError("read failure on " + path);
  return result;
}

std::vector<DialoguePair> filter_and_truncate(
    const std::vector<DialoguePair>& pairs, const FilterConfig& config) {
  std::vector<DialoguePair> out;
  out.reserve(pairs.size());
  for (const auto& pair : pairs) {
    DialoguePair p = pair;
    truncate_source(&p.input_utterances, config.max_src_tokens);
    truncate_target(&p.target_utterances, config.max_tgt_tokens);
    if (p.target_utterances.empty() || p.input_utterances.empty()) continue;
    if (word_count(p.input_utterances) < config.min_tokens) continue;
    if (word_count(p.target_utterances) < config.min_tokens) continue;
    out.push_back(std::move(p));
  }
  return out;
}

std::array<size_t, 3> split_sizes(size_t n, const SplitRatios& ratios) {
  if (ratios.train < 0 || ratios.val < 0 || ratios.test < 0 ||
      std::abs(ratios.train + ratios.val + ratios.test - 1.0) > 1e-9) {
    throw ConfigError("split ratios must be non-negative and sum to 1");
  }
  // The epsilon keeps products like 20 * 0.05 from flooring to 0.
  const auto part = [n](double r) {
    return static_cast<size_t>(std::floor(static_cast<double>(n) * r + 1e-9));
  };
  const size_t val = part(ratios.val);
  const size_t test = part(ratios.test);
  return {n - val - test, val, test};
}

Splits split(std::vector<DialoguePair> pairs, const SplitRatios& ratios,
             uint64_t seed) {
  const auto sizes = split_sizes(pairs.size(), ratios);
  Rng rng(seed);
  rng.shuffle(pairs);
  Splits s;
  auto it = std::make_move_iterator(pairs.begin());
  s.train.assign(it, it + static_cast<long>(sizes[0]));
  s.val.assign(it + static_cast<long>(sizes[0]),
               it + static_cast<long>(sizes[0] + sizes[1]));
  s.test.assign(it + static_cast<long>(sizes[0] + sizes[1]),
                std::make_move_iterator(pairs.end()));
  return s;
}

CorpusStats& CorpusStats::operator+=(const CorpusStats& o) {
  n_dialogues += o.n_dialogues;
  words_in += o.words_in;
  words_out += o.words_out;
  utts_in += o.utts_in;
  utts_out += o.utts_out;
  terms_in += o.terms_in;
  terms_out += o.terms_out;
  return *this;
}

CorpusStats operator+(CorpusStats a, const CorpusStats& b) { return a += b; }

CorpusStats compute_stats(const std::vector<AnnotatedPair>& pairs) {
  CorpusStats s;
  for (const auto& p : pairs) {
    ++s.n_dialogues;
    s.utts_in += p.src_utterances;
    s.utts_out += p.tgt_utterances;
    accumulate(p.src, &s.words_in, &s.terms_in);
    accumulate(p.tgt, &s.words_out, &s.terms_out);
  }
  return s;
}

CorpusStats compute_stats(const std::vector<DialoguePair>& pairs,
                          const Lexicon& lex) {
  return compute_stats(annotate_corpus(pairs, lex));
}

const std::vector<std::string>& stats_row_labels() {
  static const std::vector<std::string> labels = {
      "# Dialogues",
      "# Words",
      "# Terms (words)",
      "Avg. # Words in Input Text",
      "Avg. # Utterances in Input Text",
      "Avg. # Terms in Input Text",
      "Avg. # Words in Output Text",
      "Avg. # Utterances in Output Text",
      "Avg. # Terms in Output Text",
  };
  return labels;
}

std::string format_stats_table(
    const std::vector<std::pair<std::string, CorpusStats>>& columns) {
  const auto& labels = stats_row_labels();
  std::vector<std::vector<std::string>> cells(labels.size());
  char buf[64];
  for (const auto& [name, s] : columns) {
    const uint64_t counts[] = {s.n_dialogues, s.n_words(), s.n_term_words()};
    for (int r = 0; r < 3; ++r) {
      cells[r].push_back(std::to_string(counts[r]));
    }
    const double avgs[] = {s.avg_words_in(),  s.avg_utts_in(),
                           s.avg_terms_in(),  s.avg_words_out(),
                           s.avg_utts_out(),  s.avg_terms_out()};
    for (int r = 0; r < 6; ++r) {
      std::snprintf(buf, sizeof(buf), "%.2f", avgs[r]);
      cells[3 + r].push_back(buf);
    }
  }

  size_t label_width = std::string("Datasets").size();
  for (const auto& l : labels) label_width = std::max(label_width, l.size());
  std::vector<size_t> widths;
  for (size_t c = 0; c < columns.size(); ++c) {
    size_t w = columns[c].first.size();
    for (const auto& row : cells) w = std::max(w, row[c].size());
    widths.push_back(w);
  }

  std::ostringstream out;
  const auto pad_right = [](const std::string& s, size_t w) {
    return s + std::string(w - s.size(), ' ');
  };
  const auto pad_left = [](const std::string& s, size_t w) {
    return std::string(w - s.size(), ' ') + s;
  };
  out << pad_right("Datasets", label_width);
  for (size_t c = 0; c < columns.size(); ++c) {
    out << " | " << pad_left(columns[c].first, widths[c]);
  }
  out << '\n';
  for (size_t r = 0; r < labels.size(); ++r) {
    out << pad_right(labels[r], label_width);
    for (size_t c = 0; c < columns.size(); ++c) {
      out << " | " << pad_left(cells[r][c], widths[c]);
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace termdialog
