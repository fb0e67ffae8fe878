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

#ifndef TERMDIALOG_RECORDS_H_
#define TERMDIALOG_RECORDS_H_

#include <string>
#include <vector>

#include "json.hpp"
#include "termdialog/annotator.h"
#include "termdialog/corpus.h"

namespace termdialog {

// Annotated JSON-lines record, keys in this order:
// {id, src_text, src_flattened, src_labels, src_spans,
//  tgt_text, tgt_flattened, tgt_labels, tgt_spans}
// Spans are [start, end) token index pairs.
std::string annotated_record_line(const AnnotatedPair& pair);

// Parses one record and re-derives tokens from the text. Throws
// ValidationError if flattened/labels/spans disagree with the text.
AnnotatedPair parse_annotated_record(const std::string& line);

std::vector<AnnotatedPair> read_annotated_jsonl(const std::string& path);
void write_annotated_jsonl(const std::string& path,
                           const std::vector<AnnotatedPair>& pairs);

nlohmann::ordered_json stats_to_json(const CorpusStats& stats);

// Generated response record {id, candidate, reference}.
struct ResponseRecord {
  std::string id;
  std::string candidate;
  std::string reference;
};

std::vector<ResponseRecord> read_responses_jsonl(const std::string& path);
void write_responses_jsonl(const std::string& path,
                           const std::vector<ResponseRecord>& records);

// Per-token negative log-likelihoods {id, token_nlls: [...]}, one line per
// reference response.
struct NllRecord {
  std::string id;
  std::vector<double> token_nlls;
};

std::vector<NllRecord> read_nll_jsonl(const std::string& path);
void write_nll_jsonl(const std::string& path,
                     const std::vector<NllRecord>& records);

// Reads a whole file; throws LoadError.
std::string read_file(const std::string& path);
// Writes atomically enough for our purposes; throws LoadError.
void write_file(const std::string& path, const std::string& contents);

}  // namespace termdialog

#endif  // TERMDIALOG_RECORDS_H_
