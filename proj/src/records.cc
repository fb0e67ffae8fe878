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

#include "termdialog/records.h"

#include <fstream>
#include <sstream>

#include "termdialog/error.h"
#include "termdialog/text.h"

namespace termdialog {
namespace {

using ojson = nlohmann::ordered_json;

ojson spans_json(const std::vector<TermSpan>& spans) {
  ojson arr = ojson::array();
  for (const auto& s : spans) arr.push_back({s.start, s.end});
  return arr;
}

ojson labels_json(const std::vector<uint8_t>& labels) {
  ojson arr = ojson::array();
  for (uint8_t l : labels) arr.push_back(static_cast<int>(l));
  return arr;
}

AnnotatedSequence rebuild_sequence(const ojson& rec, const std::string& side) {
  const std::string text = rec.at(side + "_text").get<std::string>();
  std::vector<TermSpan> spans;
  for (const auto& s : rec.at(side + "_spans")) {
    if (!s.is_array() || s.size() != 2) {
      throw ValidationError(side + "_spans entries must be [start, end]");
    }
    spans.push_back({s[0].get<size_t>(), s[1].get<size_t>()});
  }
  AnnotatedSequence seq = flatten(tokenize(text), spans);

  std::vector<uint8_t> labels;
  for (const auto& l : rec.at(side + "_labels")) {
    const int v = l.get<int>();
    if (v != 0 && v != 1) throw ValidationError("labels must be 0 or 1");
    labels.push_back(static_cast<uint8_t>(v));
  }
  if (labels != seq.labels) {
    throw ValidationError(side + "_labels disagree with " + side + "_spans");
  }
  if (rec.at(side + "_flattened").get<std::string>() != seq.flattened_text()) {
    throw ValidationError(side + "_flattened disagrees with " + side +
                          "_text and spans");
  }
  return seq;
}

template <typename Fn>
void for_each_line(const std::string& path, Fn&& fn) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot open " + path);
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      fn(line);
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError(path + ":" + std::to_string(line_no) + ": " +
                            e.what());
    } catch (const ValidationError& e) {
      throw ValidationError(path + ":" + std::to_string(line_no) + ": " +
                            e.what());
    }
  }
}

size_t count_utterances(const std::string& text) {
  size_t n = 0;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) n += !trim(line).empty();
  return n;
}

}  // namespace

std::string annotated_record_line(const AnnotatedPair& p) {
  ojson rec;
  rec["id"] = p.id;
  rec["src_text"] = p.src_text;
  rec["src_flattened"] = p.src.flattened_text();
  rec["src_labels"] = labels_json(p.src.labels);
  rec["src_spans"] = spans_json(p.src.spans);
  rec["tgt_text"] = p.tgt_text;
  rec["tgt_flattened"] = p.tgt.flattened_text();
  rec["tgt_labels"] = labels_json(p.tgt.labels);
  rec["tgt_spans"] = spans_json(p.tgt.spans);
  return rec.dump();
}

AnnotatedPair parse_annotated_record(const std::string& line) {
  const ojson rec = ojson::parse(line);
  AnnotatedPair p;
  p.id = rec.at("id").get<std::string>();
  p.src_text = rec.at("src_text").get<std::string>();
  p.tgt_text = rec.at("tgt_text").get<std::string>();
  p.src = rebuild_sequence(rec, "src");
  p.tgt = rebuild_sequence(rec, "tgt");
  p.src_utterances = count_utterances(p.src_text);
  p.tgt_utterances = count_utterances(p.tgt_text);
  return p;
}

std::vector<AnnotatedPair> read_annotated_jsonl(const std::string& path) {
  std::vector<AnnotatedPair> out;
  for_each_line(path, [&](const std::string& line) {
    out.push_back(parse_annotated_record(line));
  });
  return out;
}

void write_annotated_jsonl(const std::string& path,
                           const std::vector<AnnotatedPair>& pairs) {
  std::string buf;
  for (const auto& p : pairs) {
    buf += annotated_record_line(p);
    buf += '\n';
  }
  write_file(path, buf);
}

nlohmann::ordered_json stats_to_json(const CorpusStats& s) {
  ojson j;
  j["n_dialogues"] = s.n_dialogues;
  j["n_words"] = s.n_words();
  j["n_term_words"] = s.n_term_words();
  j["avg_words_in"] = s.avg_words_in();
  j["avg_utts_in"] = s.avg_utts_in();
  j["avg_terms_in"] = s.avg_terms_in();
  j["avg_words_out"] = s.avg_words_out();
  j["avg_utts_out"] = s.avg_utts_out();
  j["avg_terms_out"] = s.avg_terms_out();
  return j;
}

std::vector<ResponseRecord> read_responses_jsonl(const std::string& path) {
  std::vector<ResponseRecord> out;
  for_each_line(path, [&](const std::string& line) {
    const ojson rec = ojson::parse(line);
    out.push_back({rec.at("id").get<std::string>(),
                   rec.at("candidate").get<std::string>(),
                   rec.at("reference").get<std::string>()});
  });
  return out;
}

void write_responses_jsonl(const std::string& path,
                           const std::vector<ResponseRecord>& records) {
  std::string buf;
  for (const auto& r : records) {
    ojson rec;
    rec["id"] = r.id;
    rec["candidate"] = r.candidate;
    rec["reference"] = r.reference;
    buf += rec.dump();
    buf += '\n';
  }
  write_file(path, buf);
}

std::vector<NllRecord> read_nll_jsonl(const std::string& path) {
  std::vector<NllRecord> out;
  for_each_line(path, [&](const std::string& line) {
    const ojson rec = ojson::parse(line);
    out.push_back({rec.at("id").get<std::string>(),
                   rec.at("token_nlls").get<std::vector<double>>()});
  });
  return out;
}

void write_nll_jsonl(const std::string& path,
                     const std::vector<NllRecord>& records) {
  std::string buf;
  for (const auto& r : records) {
    ojson rec;
    rec["id"] = r.id;
    rec["token_nlls"] = r.token_nlls;
    buf += rec.dump();
    buf += '\n';
  }
  write_file(path, buf);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw LoadError("cannot write " + path);
  out << contents;
  if (!out) throw LoadError("write failure on " + path);
}

}  // namespace termdialog
