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

#include "termdialog/pipeline.h"

#include <filesystem>
#include <fstream>
#include <set>

#include "termdialog/error.h"
#include "termdialog/model/checkpoint.h"
#include "termdialog/model/data.h"
#include "termdialog/records.h"
#include "termdialog/report.h"
#include "termdialog/text.h"

namespace termdialog {
namespace {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

void reject_unknown_keys(const ojson& section, const std::string& name,
                         const std::set<std::string>& allowed) {
  if (!section.is_object()) throw ConfigError("config section '" + name + "' must be an object");
  for (const auto& [key, value] : section.items()) {
    if (!allowed.count(key)) {
      throw ConfigError("unknown config key '" + name + "." + key + "'");
    }
  }
}

template <typename T>
void read(const ojson& section, const char* key, T* out) {
  auto it = section.find(key);
  if (it == section.end()) return;
  try {
    *out = it->get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(std::string("config key '") + key + "' has the wrong type");
  }
}

std::string resolve(const std::string& base_dir, const std::string& path) {
  if (path.empty() || fs::path(path).is_absolute() || base_dir.empty()) return path;
  return (fs::path(base_dir) / path).lexically_normal().string();
}

void require(const std::string& value, const std::string& key) {
  if (value.empty()) throw ConfigError("missing required config key '" + key + "'");
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw LoadError("cannot create directory " + dir + ": " + ec.message());
}

std::string join_path(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

DecodeStrategy parse_strategy(const std::string& name, int beam_size) {
  if (name == "greedy") return DecodeStrategy::greedy();
  if (name == "beam") {
    if (beam_size < 1) throw ConfigError("decode.beam_size must be >= 1");
    return DecodeStrategy::beam(beam_size);
  }
  throw ConfigError("decode.strategy must be 'greedy' or 'beam'");
}

// Lines of an annotate input become pairs; raw dialogues expand to one pair
// per doctor turn.
void parse_annotate_line(const std::string& line, std::vector<DialoguePair>* out) {
  const ojson rec = ojson::parse(line, nullptr, false);
  if (rec.is_discarded() || !rec.is_object()) {
    throw ValidationError("input line is not a JSON object");
  }
  if (rec.contains("utterances")) {
    if (!parse_raw_line(line, out)) throw ValidationError("malformed dialogue record");
    return;
  }
  try {
    DialoguePair pair;
    pair.id = rec.at("id").is_string() ? rec.at("id").get<std::string>()
                                       : rec.at("id").dump();
    pair.input_utterances =
        split_utterances(rec.at("src_text").get<std::string>(), Speaker::kPatient);
    pair.target_utterances =
        split_utterances(rec.at("tgt_text").get<std::string>(), Speaker::kDoctor);
    out->push_back(std::move(pair));
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("pair record needs id, src_text, tgt_text: ") + e.what());
  }
}

}  // namespace

PipelineConfig PipelineConfig::from_json(const ojson& doc, const std::string& base_dir) {
  PipelineConfig c;
  reject_unknown_keys(doc, "<root>",
                      {"paths", "split", "filter", "model", "train", "decode", "threads"});
  read(doc, "threads", &c.threads);

  if (doc.contains("paths")) {
    const auto& p = doc["paths"];
    reject_unknown_keys(p, "paths", {"raw", "lexicon", "out_dir", "train", "val",
                                     "test", "checkpoint"});
    read(p, "raw", &c.raw_path);
    read(p, "lexicon", &c.lexicon_path);
    read(p, "out_dir", &c.out_dir);
    read(p, "train", &c.train_path);
    read(p, "val", &c.val_path);
    read(p, "test", &c.test_path);
    read(p, "checkpoint", &c.checkpoint_path);
    for (auto* path : {&c.raw_path, &c.lexicon_path, &c.out_dir, &c.train_path,
                       &c.val_path, &c.test_path, &c.checkpoint_path}) {
      *path = resolve(base_dir, *path);
    }
  }
  if (doc.contains("split")) {
    const auto& s = doc["split"];
    reject_unknown_keys(s, "split", {"train", "val", "test", "seed"});
    read(s, "train", &c.ratios.train);
    read(s, "val", &c.ratios.val);
    read(s, "test", &c.ratios.test);
    read(s, "seed", &c.split_seed);
  }
  if (doc.contains("filter")) {
    const auto& f = doc["filter"];
    reject_unknown_keys(f, "filter", {"max_src_tokens", "max_tgt_tokens", "min_tokens"});
    read(f, "max_src_tokens", &c.filter.max_src_tokens);
    read(f, "max_tgt_tokens", &c.filter.max_tgt_tokens);
    read(f, "min_tokens", &c.filter.min_tokens);
  }
  if (doc.contains("model")) {
    const auto& m = doc["model"];
    reject_unknown_keys(m, "model", {"d_model", "n_heads", "n_enc_layers", "n_dec_layers",
                                     "ffn_dim", "max_len", "dropout", "min_freq"});
    read(m, "d_model", &c.model.d_model);
    read(m, "n_heads", &c.model.n_heads);
    read(m, "n_enc_layers", &c.model.n_enc_layers);
    read(m, "n_dec_layers", &c.model.n_dec_layers);
    read(m, "ffn_dim", &c.model.ffn_dim);
    read(m, "max_len", &c.model.max_len);
    read(m, "dropout", &c.model.dropout);
    read(m, "min_freq", &c.min_freq);
  }
  if (doc.contains("train")) {
    const auto& t = doc["train"];
    reject_unknown_keys(t, "train", {"batch_size", "learning_rate", "epochs", "seed", "beta1",
                                     "beta2", "epsilon", "grad_clip", "classify_on_markers",
                                     "use_auxiliary", "max_steps", "preset"});
    std::string preset;
    read(t, "preset", &preset);
    if (preset == "desk") {
      c.train = TrainConfig::desk();
    } else if (!preset.empty() && preset != "default") {
      throw ConfigError("train.preset must be 'default' or 'desk'");
    }
    read(t, "batch_size", &c.train.batch_size);
    read(t, "learning_rate", &c.train.learning_rate);
    read(t, "epochs", &c.train.epochs);
    read(t, "seed", &c.train.seed);
    read(t, "beta1", &c.train.beta1);
    read(t, "beta2", &c.train.beta2);
    read(t, "epsilon", &c.train.epsilon);
    read(t, "grad_clip", &c.train.grad_clip);
    read(t, "classify_on_markers", &c.train.classify_on_markers);
    read(t, "use_auxiliary", &c.train.use_auxiliary);
    read(t, "max_steps", &c.train.max_steps);
  }
  if (doc.contains("decode")) {
    const auto& d = doc["decode"];
    reject_unknown_keys(d, "decode", {"strategy", "beam_size", "max_new"});
    std::string strategy = "greedy";
    int beam_size = 4;
    read(d, "strategy", &strategy);
    read(d, "beam_size", &beam_size);
    read(d, "max_new", &c.decode.max_new);
    c.decode.strategy = parse_strategy(strategy, beam_size);
  }
  if (c.threads < 1) throw ConfigError("threads must be >= 1");
  return c;
}

ojson PipelineConfig::to_json() const {
  ojson doc;
  doc["paths"] = {{"raw", raw_path},     {"lexicon", lexicon_path},
                  {"out_dir", out_dir},  {"train", train_path},
                  {"val", val_path},     {"test", test_path},
                  {"checkpoint", checkpoint_path}};
  doc["split"] = {{"train", ratios.train}, {"val", ratios.val},
                  {"test", ratios.test},   {"seed", split_seed}};
  doc["filter"] = {{"max_src_tokens", filter.max_src_tokens},
                   {"max_tgt_tokens", filter.max_tgt_tokens},
                   {"min_tokens", filter.min_tokens}};
  ojson m = model_config_to_json(model);
  m.erase("vocab_size");
  m["min_freq"] = min_freq;
  doc["model"] = m;
  doc["train"] = {{"batch_size", train.batch_size},
                  {"learning_rate", train.learning_rate},
                  {"epochs", train.epochs},
                  {"seed", train.seed},
                  {"beta1", train.beta1},
                  {"beta2", train.beta2},
                  {"epsilon", train.epsilon},
                  {"grad_clip", train.grad_clip},
                  {"classify_on_markers", train.classify_on_markers},
                  {"use_auxiliary", train.use_auxiliary},
                  {"max_steps", train.max_steps}};
  const bool beam = decode.strategy.kind == DecodeStrategy::Kind::kBeam;
  doc["decode"] = {{"strategy", beam ? "beam" : "greedy"},
                   {"beam_size", decode.strategy.beam_size},
                   {"max_new", decode.max_new}};
  doc["threads"] = threads;
  return doc;
}

void PipelineConfig::set_seed(uint64_t seed) {
  split_seed = seed;
  train.seed = seed;
}

PipelineConfig load_pipeline_config(const std::string& path) {
  const ojson doc = ojson::parse(read_file(path), nullptr, false);
  if (doc.is_discarded()) throw ConfigError("config is not valid JSON: " + path);
  return PipelineConfig::from_json(doc, fs::path(path).parent_path().string());
}

AnnotateSummary run_annotate(const std::string& input_path,
                             const std::string& lexicon_path,
                             const std::string& output_path, int threads) {
  const Lexicon lex = Lexicon::load(lexicon_path);
  std::ifstream in(input_path, std::ios::binary);
  if (!in) throw LoadError("cannot open " + input_path);
  std::ofstream out(output_path, std::ios::binary | std::ios::trunc);
  if (!out) throw LoadError("cannot write " + output_path);

  AnnotateSummary summary;
  constexpr size_t kChunk = 4096;
  std::vector<DialoguePair> chunk;
  const auto flush = [&] {
    for (const auto& rec : annotate_corpus(chunk, lex, threads)) {
      out << annotated_record_line(rec) << '\n';
      ++summary.records;
      summary.tokens += rec.src.tokens.size() + rec.tgt.tokens.size();
      summary.term_phrases += rec.src.spans.size() + rec.tgt.spans.size();
    }
    chunk.clear();
  };
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      parse_annotate_line(line, &chunk);
    } catch (const ValidationError& e) {
      throw ValidationError(input_path + ":" + std::to_string(line_no) + ": " + e.what());
    }
    if (chunk.size() >= kChunk) flush();
  }
  flush();
  if (!out) throw LoadError("write failure on " + output_path);
  return summary;
}

PrepareSummary run_prepare(const PipelineConfig& config) {
  require(config.raw_path, "paths.raw");
  require(config.lexicon_path, "paths.lexicon");
  require(config.out_dir, "paths.out_dir");
  const Lexicon lex = Lexicon::load(config.lexicon_path);

  PrepareSummary summary;
  ParseResult parsed = parse_raw(config.raw_path);
  summary.dialogues = parsed.dialogues;
  summary.skipped_lines = parsed.skipped_lines;
  summary.pairs = parsed.pairs.size();
  std::vector<DialoguePair> kept = filter_and_truncate(parsed.pairs, config.filter);
  summary.kept_pairs = kept.size();
  Splits parts = split(std::move(kept), config.ratios, config.split_seed);

  ensure_dir(config.out_dir);
  const std::pair<const char*, const std::vector<DialoguePair>*> named[] = {
      {"train", &parts.train}, {"val", &parts.val}, {"test", &parts.test}};
  std::vector<std::pair<std::string, CorpusStats>> columns;
  ojson stats_json;
  const char* titles[] = {"Train", "Val", "Test"};
  for (size_t i = 0; i < 3; ++i) {
    const auto annotated = annotate_corpus(*named[i].second, lex, config.threads);
    write_annotated_jsonl(join_path(config.out_dir, std::string(named[i].first) + ".jsonl"),
                          annotated);
    const CorpusStats stats = compute_stats(annotated);
    columns.emplace_back(titles[i], stats);
    stats_json[named[i].first] = stats_to_json(stats);
    summary.split_sizes[i] = named[i].second->size();
  }
  summary.stats_table = format_stats_table(columns);
  write_file(join_path(config.out_dir, "stats.json"), stats_json.dump(2) + "\n");
  write_file(join_path(config.out_dir, "stats.txt"), summary.stats_table);
  write_file(join_path(config.out_dir, "config.resolved.json"), config.to_json().dump(2) + "\n");
  return summary;
}

std::string run_stats(const std::vector<std::string>& annotated_paths,
                      const std::string& json_output) {
  std::vector<std::pair<std::string, CorpusStats>> columns;
  ojson stats_json;
  for (const auto& path : annotated_paths) {
    const std::string name = fs::path(path).stem().string();
    const CorpusStats stats = compute_stats(read_annotated_jsonl(path));
    columns.emplace_back(name, stats);
    stats_json[name] = stats_to_json(stats);
  }
  if (!json_output.empty()) write_file(json_output, stats_json.dump(2) + "\n");
  return format_stats_table(columns);
}

TrainSummary run_train(const PipelineConfig& config) {
  require(config.train_path, "paths.train");
  require(config.out_dir, "paths.out_dir");
  const auto train_pairs = read_annotated_jsonl(config.train_path);
  if (train_pairs.empty()) throw ValidationError("training file has no records");
  std::vector<AnnotatedPair> val_pairs;
  if (!config.val_path.empty()) val_pairs = read_annotated_jsonl(config.val_path);

  Checkpoint ckpt;
  ckpt.vocab = build_vocab(train_pairs, config.min_freq);
  ckpt.config = config.model;
  ckpt.config.vocab_size = ckpt.vocab.size();
  ckpt.example_options = {config.model.max_len, config.train.classify_on_markers};

  const auto train_set = make_examples(train_pairs, ckpt.vocab, ckpt.example_options);
  const auto val_set = make_examples(val_pairs, ckpt.vocab, ckpt.example_options);
  TrainResult result = train(train_set, val_set, config.train, ckpt.config);
  ckpt.params = std::move(result.best_params);

  ensure_dir(config.out_dir);
  TrainSummary summary;
  summary.checkpoint_path = join_path(config.out_dir, "checkpoint.json");
  save_checkpoint(summary.checkpoint_path, ckpt);
  write_file(join_path(config.out_dir, "history.csv"), history_csv(result.history));
  write_file(join_path(config.out_dir, "config.resolved.json"), config.to_json().dump(2) + "\n");
  summary.steps = result.steps;
  summary.best_epoch = result.best_epoch;
  summary.best_val_ppl = result.best_val_ppl;
  if (!result.history.empty()) summary.last = result.history.back();
  return summary;
}

GeneratedSet run_generate(const std::string& checkpoint_path,
                          const std::string& input_path,
                          const DecodeConfig& decode) {
  Checkpoint ckpt = load_checkpoint(checkpoint_path);
  const Seq2SeqModel<double> model(ckpt.config, std::move(ckpt.params));
  const auto pairs = read_annotated_jsonl(input_path);
  if (pairs.empty()) throw ValidationError("no records to generate from in " + input_path);

  GeneratedSet out;
  for (const auto& pair : pairs) {
    const Example ex = make_example(pair, ckpt.vocab, ckpt.example_options);
    const std::vector<int> ids = generate(model, ex.src_ids, decode.max_new, decode.strategy);
    out.responses.push_back({pair.id, detokenize(ids, ckpt.vocab), pair.tgt_text});
    out.nlls.push_back({pair.id, token_nlls(model, ex)});
  }
  return out;
}

MetricReport run_evaluate(const std::vector<ResponseRecord>& responses,
                          const std::vector<NllRecord>& nlls,
                          const std::string& lexicon_path,
                          const std::string& out_dir) {
  if (responses.empty()) throw ValidationError("evaluation set is empty");
  const Lexicon lex = Lexicon::load(lexicon_path);
  std::vector<std::string> candidates, references;
  for (const auto& r : responses) {
    candidates.push_back(r.candidate);
    references.push_back(r.reference);
  }
  std::vector<double> pooled;
  for (const auto& n : nlls) pooled.insert(pooled.end(), n.token_nlls.begin(), n.token_nlls.end());
  MetricReport report = evaluate_run(candidates, references, pooled, lex);
  if (!out_dir.empty()) {
    ensure_dir(out_dir);
    write_file(join_path(out_dir, "report.json"), report_to_json(report).dump(2) + "\n");
    write_file(join_path(out_dir, "report.txt"), format_report_table(report));
  }
  return report;
}

}  // namespace termdialog
