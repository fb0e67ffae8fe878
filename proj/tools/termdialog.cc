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

// Command-line entry point: annotate, prepare, stats, train, generate and
// evaluate. Exit codes: 0 success, 1 runtime or validation error, 2 usage.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "termdialog/error.h"
#include "termdialog/pipeline.h"
#include "termdialog/records.h"
#include "termdialog/report.h"

namespace td = termdialog;

namespace {

struct CommonFlags {
  std::string config;
  std::optional<uint64_t> seed;
  std::optional<int> threads;
  std::string out_dir;
};

void add_common(CLI::App* cmd, CommonFlags* f) {
  cmd->add_option("--config", f->config, "JSON pipeline config")->check(CLI::ExistingFile);
  cmd->add_option("--seed", f->seed, "Overrides split and training seeds");
  cmd->add_option("--threads", f->threads, "Worker threads")->check(CLI::PositiveNumber);
  cmd->add_option("--out-dir", f->out_dir, "Output directory");
}

td::PipelineConfig resolve(const CommonFlags& f) {
  td::PipelineConfig config;
  if (!f.config.empty()) config = td::load_pipeline_config(f.config);
  if (f.seed) config.set_seed(*f.seed);
  if (f.threads) config.threads = *f.threads;
  if (!f.out_dir.empty()) config.out_dir = f.out_dir;
  return config;
}

std::string pick(const std::string& flag, const std::string& from_config,
                 const char* what) {
  const std::string& v = flag.empty() ? from_config : flag;
  if (v.empty()) throw td::ConfigError(std::string("no ") + what + " given");
  return v;
}

std::string in_dir(const std::string& dir, const char* name) {
  return (std::filesystem::path(dir) / name).string();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Terminology-aware medical dialogue generation toolkit"};
  app.require_subcommand(1);

  CommonFlags annotate_flags, prepare_flags, stats_flags, train_flags,
      generate_flags, evaluate_flags;

  auto* annotate = app.add_subcommand("annotate", "Mark terminology phrases in JSON lines");
  add_common(annotate, &annotate_flags);
  std::string ann_input, ann_lexicon, ann_output;
  annotate->add_option("-i,--input", ann_input, "Dialogues or pairs (JSONL)")
      ->required()->check(CLI::ExistingFile);
  annotate->add_option("-l,--lexicon", ann_lexicon, "Term wordlist");
  annotate->add_option("-o,--output", ann_output, "Annotated JSONL")->required();

  auto* prepare = app.add_subcommand("prepare", "Parse, filter, split, annotate, count");
  add_common(prepare, &prepare_flags);
  std::string prep_raw;
  prepare->add_option("--raw", prep_raw, "Raw dialogue dump (JSONL)");

  auto* stats = app.add_subcommand("stats", "Corpus statistics for annotated files");
  add_common(stats, &stats_flags);
  std::vector<std::string> stats_files;
  std::string stats_json;
  stats->add_option("files", stats_files, "Annotated JSONL files")
      ->required()->check(CLI::ExistingFile);
  stats->add_option("--json", stats_json, "Also write the statistics as JSON");

  auto* train = app.add_subcommand("train", "Train on the joint loss");
  add_common(train, &train_flags);

  auto* generate = app.add_subcommand("generate", "Decode responses for an annotated file");
  add_common(generate, &generate_flags);
  std::string gen_checkpoint, gen_input, gen_strategy;
  int gen_beam = 0, gen_max_new = 0;
  generate->add_option("--checkpoint", gen_checkpoint);
  generate->add_option("--input", gen_input, "Annotated JSONL (defaults to paths.test)");
  generate->add_option("--strategy", gen_strategy)->check(CLI::IsMember({"greedy", "beam"}));
  generate->add_option("--beam-size", gen_beam)->check(CLI::PositiveNumber);
  generate->add_option("--max-new", gen_max_new)->check(CLI::PositiveNumber);

  auto* evaluate = app.add_subcommand("evaluate", "Score generated responses");
  add_common(evaluate, &evaluate_flags);
  std::string eval_responses, eval_nlls, eval_lexicon;
  evaluate->add_option("--responses", eval_responses, "responses.jsonl from generate");
  evaluate->add_option("--nlls", eval_nlls, "nlls.jsonl from generate");
  evaluate->add_option("--lexicon", eval_lexicon);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (annotate->parsed()) {
      const auto config = resolve(annotate_flags);
      const auto s = td::run_annotate(ann_input, pick(ann_lexicon, config.lexicon_path, "lexicon"),
                                      ann_output, config.threads);
      std::cout << ann_output << ": records=" << s.records << " tokens=" << s.tokens
                << " term_phrases=" << s.term_phrases << "\n";
    } else if (prepare->parsed()) {
      auto config = resolve(prepare_flags);
      if (!prep_raw.empty()) config.raw_path = prep_raw;
      const auto s = td::run_prepare(config);
      std::cout << "dialogues=" << s.dialogues << " skipped_lines=" << s.skipped_lines
                << " pairs=" << s.pairs << " kept=" << s.kept_pairs << " train="
                << s.split_sizes[0] << " val=" << s.split_sizes[1] << " test="
                << s.split_sizes[2] << "\n"
                << s.stats_table;
    } else if (stats->parsed()) {
      std::cout << td::run_stats(stats_files, stats_json);
    } else if (train->parsed()) {
      const auto config = resolve(train_flags);
      const auto s = td::run_train(config);
      std::cout << "steps=" << s.steps << " best_epoch=" << s.best_epoch
                << " best_val_ppl=" << s.best_val_ppl << " lm_loss=" << s.last.lm_loss
                << " classifier_loss=" << s.last.classifier_loss << "\n"
                << "checkpoint: " << s.checkpoint_path << "\n";
    } else if (generate->parsed()) {
      auto config = resolve(generate_flags);
      if (!gen_strategy.empty()) {
        const int k = gen_beam > 0 ? gen_beam : std::max(config.decode.strategy.beam_size, 1);
        config.decode.strategy = gen_strategy == "beam" ? td::DecodeStrategy::beam(k)
                                                        : td::DecodeStrategy::greedy();
      }
      if (gen_max_new > 0) config.decode.max_new = gen_max_new;
      const std::string out_dir = pick(config.out_dir, "", "--out-dir");
      const std::string checkpoint =
          gen_checkpoint.empty() && config.checkpoint_path.empty()
              ? in_dir(out_dir, "checkpoint.json")
              : pick(gen_checkpoint, config.checkpoint_path, "checkpoint");
      const auto set = td::run_generate(
          checkpoint, pick(gen_input, config.test_path, "input"), config.decode);
      std::filesystem::create_directories(out_dir);
      td::write_responses_jsonl(in_dir(out_dir, "responses.jsonl"), set.responses);
      td::write_nll_jsonl(in_dir(out_dir, "nlls.jsonl"), set.nlls);
      std::cout << "responses=" << set.responses.size() << " -> "
                << in_dir(out_dir, "responses.jsonl") << "\n";
    } else if (evaluate->parsed()) {
      const auto config = resolve(evaluate_flags);
      const std::string out_dir = config.out_dir;
      const std::string responses_path =
          eval_responses.empty() && !out_dir.empty() ? in_dir(out_dir, "responses.jsonl")
                                                     : pick(eval_responses, "", "--responses");
      std::string nlls_path = eval_nlls;
      if (nlls_path.empty() && !out_dir.empty() &&
          std::filesystem::exists(in_dir(out_dir, "nlls.jsonl"))) {
        nlls_path = in_dir(out_dir, "nlls.jsonl");
      }
      const auto responses = td::read_responses_jsonl(responses_path);
      std::vector<td::NllRecord> nlls;
      if (!nlls_path.empty()) nlls = td::read_nll_jsonl(nlls_path);
      const auto report = td::run_evaluate(
          responses, nlls, pick(eval_lexicon, config.lexicon_path, "lexicon"), out_dir);
      std::cout << td::format_report_table(report);
    }
  } catch (const td::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
