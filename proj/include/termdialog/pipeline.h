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

#ifndef TERMDIALOG_PIPELINE_H_
#define TERMDIALOG_PIPELINE_H_

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "termdialog/corpus.h"
#include "termdialog/metrics.h"
#include "termdialog/model/decode.h"
#include "termdialog/model/trainer.h"
#include "termdialog/model/transformer.h"
#include "termdialog/records.h"

namespace termdialog {

struct DecodeConfig {
  DecodeStrategy strategy;
  int max_new = 64;
};

// Resolved settings for every subcommand. Loaded from a JSON file with the
// sections "paths", "split", "filter", "model", "train", "decode" plus a
// top-level "threads"; relative paths resolve against the config file's
// directory. Unknown keys are rejected.
struct PipelineConfig {
  std::string raw_path;
  std::string lexicon_path;
  std::string out_dir;
  std::string train_path;
  std::string val_path;
  std::string test_path;
  std::string checkpoint_path;

  SplitRatios ratios;
  uint64_t split_seed = 13;
  FilterConfig filter;
  ModelConfig model;
  int min_freq = 1;
  TrainConfig train;
  DecodeConfig decode;
  int threads = 1;

  static PipelineConfig from_json(const nlohmann::ordered_json& doc,
                                  const std::string& base_dir);
  nlohmann::ordered_json to_json() const;
  // Applies --seed to both the split and training seeds.
  void set_seed(uint64_t seed);
};

PipelineConfig load_pipeline_config(const std::string& path);

struct AnnotateSummary {
  size_t records = 0;
  size_t tokens = 0;
  size_t term_phrases = 0;
};

// Input lines are raw dialogues ({id, utterances}) or pairs
// ({id, src_text, tgt_text}); output is the annotated JSON-lines format.
AnnotateSummary run_annotate(const std::string& input_path,
                             const std::string& lexicon_path,
                             const std::string& output_path, int threads);

struct PrepareSummary {
  size_t dialogues = 0;
  size_t skipped_lines = 0;
  size_t pairs = 0;
  size_t kept_pairs = 0;
  std::array<size_t, 3> split_sizes{};
  std::string stats_table;
};

// parse -> filter/truncate -> split -> annotate -> stats. Writes
// {train,val,test}.jsonl, stats.json, stats.txt and config.resolved.json into
// out_dir.
PrepareSummary run_prepare(const PipelineConfig& config);

// Statistics table for annotated files; columns are named after file stems.
// Writes JSON to json_output when non-empty.
std::string run_stats(const std::vector<std::string>& annotated_paths,
                      const std::string& json_output);

struct TrainSummary {
  int steps = 0;
  int best_epoch = -1;
  double best_val_ppl = 0;
  HistoryRow last;
  std::string checkpoint_path;
};

// Builds the vocabulary from the training split, trains, and writes
// checkpoint.json (best by validation perplexity), history.csv and
// config.resolved.json into out_dir.
TrainSummary run_train(const PipelineConfig& config);

struct GeneratedSet {
  std::vector<ResponseRecord> responses;
  std::vector<NllRecord> nlls;
};

// Decodes every source of an annotated file. Candidates have markers
// stripped; references are the raw target texts.
GeneratedSet run_generate(const std::string& checkpoint_path,
                          const std::string& input_path,
                          const DecodeConfig& decode);

// Writes report.json and report.txt into out_dir (when non-empty) and
// returns the report. Throws ValidationError on an empty set.
MetricReport run_evaluate(const std::vector<ResponseRecord>& responses,
                          const std::vector<NllRecord>& nlls,
                          const std::string& lexicon_path,
                          const std::string& out_dir);

}  // namespace termdialog

#endif  // TERMDIALOG_PIPELINE_H_
