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

// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "oracles.h"
#include "synthetic.h"
#include "termdialog/annotator.h"
#include "termdialog/corpus.h"
#include "termdialog/lexicon.h"
#include "termdialog/metrics.h"
#include "termdialog/model/data.h"
#include "termdialog/model/decode.h"
#include "termdialog/model/grad_check.h"
#include "termdialog/model/trainer.h"
#include "termdialog/random.h"
#include "termdialog/records.h"
#include "termdialog/report.h"
#include "test_util.h"

using namespace termdialog;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok && pass) {
      pass = false;
      detail = what;
    }
  }
};

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  std::vector<std::string> out;
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

std::vector<std::string> wordlist_terms() {
  std::vector<std::string> out;
  for (const auto& line : read_lines(testutil::fixture("medical_wordlist.txt"))) {
    if (line.empty()) continue;
    size_t a = line.find_first_not_of(" \t");
    if (a != std::string::npos && line[a] == '#') continue;
    out.push_back(line);
  }
  return out;
}

bool agrees(const std::string& text, const Lexicon& lex, const oracle::NaiveLexicon& naive) {
  const AnnotatedSequence got = annotate(text, lex);
  const oracle::Annotation want = oracle::mark_and_merge(text, naive);
  if (got.flattened_text() != want.flattened) return false;
  if (got.spans.size() != want.spans.size()) return false;
  for (size_t i = 0; i < got.spans.size(); ++i) {
    if (got.spans[i].start != want.spans[i].first || got.spans[i].end != want.spans[i].second) {
      return false;
    }
  }
  return std::vector<int>(got.labels.begin(), got.labels.end()) == want.labels;
}

// ---- AC1 -----------------------------------------------------------------

Outcome annotation_matches_reference() {
  Outcome o;
  const auto terms = wordlist_terms();
  const Lexicon lex = Lexicon::load(testutil::fixture("medical_wordlist.txt"));
  const oracle::NaiveLexicon naive(terms);
  const auto t0 = Clock::now();

  o.require(annotate("there is infection on hand", lex).flattened_text() ==
                "there is [TERM] infection on hand",
            "worked example");

  size_t checked = 0;
  for (const auto& line : read_lines(testutil::fixture("sentences_100.txt"))) {
    o.require(agrees(line, lex, naive), "fixture sentence: " + line);
    ++checked;
  }

  // Random sentences mixing terms, fillers, punctuation and case.
  Rng rng(404);
  const std::vector<std::string> extras = {"the", "a", "shows", "and", "no", "with", ",", ".",
                                           "(", ")", "-", "?", "pain", "on", "left", "x-ray"};
  for (int i = 0; i < 1000; ++i) {
    const int n = 1 + static_cast<int>(rng.below(14));
    std::string s;
    for (int k = 0; k < n; ++k) {
      std::string w = rng.uniform() < 0.4 ? terms[rng.below(terms.size())]
                                          : extras[rng.below(extras.size())];
      if (rng.uniform() < 0.2) {
        for (char& c : w) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
      }
      if (rng.uniform() < 0.15) w += rng.uniform() < 0.5 ? "," : ".";
      if (k) s += rng.uniform() < 0.1 ? "  " : " ";
      s += w;
    }
    o.require(agrees(s, lex, naive), "random sentence: " + s);
    ++checked;
  }
  const double secs = seconds_since(t0);
  o.require(secs < 10.0, "took too long");
  char buf[128];
  std::snprintf(buf, sizeof buf, "%zu sentences in %.2fs", checked, secs);
  if (o.pass) o.detail = buf;
  return o;
}

// ---- AC2 -----------------------------------------------------------------

Outcome records_round_trip() {
  Outcome o;
  size_t n = 0, markers = 0;
  for (const auto& line : read_lines(testutil::fixture("annotate_golden.jsonl"))) {
    const AnnotatedPair p = parse_annotated_record(line);
    o.require(annotated_record_line(p) == line, "round trip of " + p.id);
    const std::pair<const AnnotatedSequence*, const std::string*> sides[] = {{&p.src, &p.src_text},
                                                                             {&p.tgt, &p.tgt_text}};
    for (const auto& [seq, text] : sides) {
      o.require(seq->marker_count() == seq->spans.size(), "marker count of " + p.id);
      markers += seq->marker_count();
      // Deleting the markers gives back the tokens of the original text.
      std::vector<std::string> unmarked, original;
      for (const auto& w : seq->flattened) {
        if (w != kTermMarker) unmarked.push_back(w);
      }
      for (const auto& t : tokenize(*text)) original.push_back(t.surface);
      o.require(unmarked == original, "markers removed from " + p.id);
    }
    ++n;
  }
  o.require(n > 0, "no records");
  if (o.pass) o.detail = std::to_string(n) + " records, " + std::to_string(markers) + " markers";
  return o;
}

// ---- AC3 -----------------------------------------------------------------

Outcome metrics_match_reference() {
  Outcome o;
  const auto t0 = Clock::now();
  auto close = [](double a, double b) { return std::abs(a - b) < 1e-9; };

  o.require(std::abs(bleu({{"the", "cat", "sat"}}, {{"the", "cat", "sat", "down"}}, 1) - 0.7165) < 5e-5,
            "BLEU-1 worked example");
  o.require(close(rouge_n(TokenList{"a", "b", "c"}, TokenList{"a", "c", "d"}, 1), 2.0 / 3.0),
            "ROUGE-1 worked example");
  o.require(close(rouge_l(TokenList{"a", "x", "b"}, TokenList{"a", "b", "y"}), 2.0 / 3.0),
            "ROUGE-L worked example");
  o.require(close(distinct_n({{"a", "b", "a"}}, 1), 2.0 / 3.0), "Dist-1 worked example");

  Rng rng(77);
  const std::vector<std::string> pool = {"he", "has", "a", "fever", "cough", "take", "rest", "now"};
  std::vector<TokenList> cands, refs;
  for (int k = 0; k < 200; ++k) {
    for (auto* side : {&cands, &refs}) {
      TokenList t;
      const size_t len = 1 + rng.below(15);
      for (size_t i = 0; i < len; ++i) t.push_back(pool[rng.below(pool.size())]);
      side->push_back(t);
    }
  }
  for (int n = 1; n <= 4; ++n) {
    o.require(close(bleu(cands, refs, n), oracle::bleu(cands, refs, n)), "BLEU-" + std::to_string(n));
    o.require(close(distinct_n(cands, n), oracle::distinct(cands, n)), "Dist-" + std::to_string(n));
  }
  double r1 = 0, r2 = 0, rl = 0;
  for (size_t k = 0; k < cands.size(); ++k) {
    r1 += oracle::rouge_n(cands[k], refs[k], 1);
    r2 += oracle::rouge_n(cands[k], refs[k], 2);
    rl += oracle::rouge_l(cands[k], refs[k]);
    o.require(close(rouge_l(cands[k], refs[k]), oracle::rouge_l(cands[k], refs[k])), "ROUGE-L pair");
  }
  const double n = static_cast<double>(cands.size());
  o.require(close(rouge_n(cands, refs, 1), r1 / n), "ROUGE-1 mean");
  o.require(close(rouge_n(cands, refs, 2), r2 / n), "ROUGE-2 mean");
  o.require(close(rouge_l(cands, refs), rl / n), "ROUGE-L mean");

  const double secs = seconds_since(t0);
  o.require(secs < 30.0, "took too long");
  char buf[128];
  std::snprintf(buf, sizeof buf, "%zu random pairs in %.2fs", cands.size(), secs);
  if (o.pass) o.detail = buf;
  return o;
}

// ---- AC4 -----------------------------------------------------------------

// Central differences of the joint loss in long double, independent of the
// library's checker.
double finite_difference(Seq2SeqModel<long double>& model, std::span<const Example> batch,
                         size_t tensor, Eigen::Index index, long double h) {
  long double& w = model.mutable_params().tensors()[tensor].tensor->data()[index];
  const long double saved = w;
  w = saved + h;
  const long double plus = evaluate_loss<long double>(model, batch).overall_loss;
  w = saved - h;
  const long double minus = evaluate_loss<long double>(model, batch).overall_loss;
  w = saved;
  return static_cast<double>((plus - minus) / (2 * h));
}

Outcome gradients_match_finite_differences() {
  Outcome o;
  const auto t0 = Clock::now();
  const auto data = synthetic::annotated(3, 41);
  const Vocab vocab = build_vocab(data, 1);
  ExampleOptions eo;
  eo.classify_on_markers = true;
  const auto batch = make_examples(data, vocab, eo);
  ModelConfig mc;
  mc.vocab_size = vocab.size();
  mc.d_model = 16;
  mc.n_heads = 2;
  mc.n_enc_layers = 1;
  mc.n_dec_layers = 1;
  mc.ffn_dim = 32;
  mc.max_len = 32;

  // Weights well away from the small initial scale, so attention is not
  // uniform and no coordinate sits at the finite-difference noise floor.
  Rng rng(8);
  ModelParams<double> params = ModelParams<double>::initialized(mc, rng);
  for (auto& t : params.tensors()) {
    for (Eigen::Index i = 0; i < t.tensor->size(); ++i) t.tensor->data()[i] += 0.3 * rng.normal();
  }
  const Seq2SeqModel<double> model(mc, params);
  ModelParams<double> grads = ModelParams<double>::zeros(mc);
  loss_and_gradients<double>(model, batch, LossOptions{}, &grads);

  ModelParams<long double> wide = ModelParams<long double>::zeros(mc);
  {
    auto dst = wide.tensors();
    const auto src = model.params().tensors();
    for (size_t i = 0; i < dst.size(); ++i) *dst[i].tensor = src[i].tensor->cast<long double>();
  }
  Seq2SeqModel<long double> probe(mc, wide);

  const auto analytic = grads.tensors();
  Rng pick(9);
  size_t coords = 0;
  double worst = 0;
  std::string worst_at;
  for (size_t t = 0; t < analytic.size(); ++t) {
    const auto n = static_cast<uint64_t>(analytic[t].tensor->size());
    std::set<Eigen::Index> chosen;
    while (chosen.size() < std::min<uint64_t>(20, n)) {
      chosen.insert(static_cast<Eigen::Index>(pick.below(n)));
    }
    for (const Eigen::Index idx : chosen) {
      const double g = analytic[t].tensor->data()[idx];
      const double fd = finite_difference(probe, batch, t, idx, 1e-5L);
      const double rel = std::abs(g - fd) / std::max(std::abs(g), 1e-8);
      if (rel > worst) {
        worst = rel;
        worst_at = analytic[t].name + "[" + std::to_string(idx) + "]";
      }
      ++coords;
    }
  }
  o.require(worst < 1e-4, "max relative error " + std::to_string(worst) + " at " + worst_at);

  // The library's own checker agrees on the same model.
  const auto report = gradient_check(model, batch, LossOptions{}, 20, 1e-5, 9);
  o.require(report.max_rel_error < 1e-4,
            "gradient_check max relative error " + std::to_string(report.max_rel_error));

  const double secs = seconds_since(t0);
  o.require(secs < 120.0, "took too long");
  char buf[200];
  std::snprintf(buf, sizeof buf, "%zu coords over %zu tensors, max rel err %.2e (checker %.2e), %.2fs",
                coords, analytic.size(), worst, report.max_rel_error, secs);
  if (o.pass) o.detail = buf;
  return o;
}

// ---- AC5 -----------------------------------------------------------------

Outcome overfits_small_set() {
  Outcome o;
  const auto t0 = Clock::now();
  const auto data = synthetic::annotated(10, 7);
  const Vocab vocab = build_vocab(data, 1);
  const auto ex = make_examples(data, vocab, {});
  ModelConfig mc;
  mc.vocab_size = vocab.size();
  TrainConfig tc = TrainConfig::desk();
  tc.batch_size = 10;
  tc.epochs = 2000;
  tc.max_steps = 2000;
  tc.seed = 1;

  auto converged = [&](const ModelParams<double>& p) {
    const Seq2SeqModel<double> m(mc, p);
    return evaluate_loss<double>(m, ex).lm_loss < 0.1 && classifier_accuracy(m, ex) == 1.0;
  };
  // The batch is the whole set, so the step loss tracks the full-set loss;
  // stop with some margin below the target.
  const auto r = train(ex, {}, tc, mc, [](const HistoryRow& h) { return h.lm_loss > 0.05; });
  const Seq2SeqModel<double> m(mc, r.final_params);
  const double lm = evaluate_loss<double>(m, ex).lm_loss;
  const double acc = classifier_accuracy(m, ex);
  o.require(converged(r.final_params), "lm " + std::to_string(lm) + " acc " + std::to_string(acc));

  std::vector<TokenList> cands, refs;
  size_t exact = 0;
  for (const auto& e : ex) {
    const auto gen = generate(m, e.src_ids, 40, DecodeStrategy::greedy());
    const std::vector<int> gold(e.tgt_out.begin(), e.tgt_out.end() - 1);
    exact += gen == gold;
    cands.push_back(metric_tokens(detokenize(gen, vocab)));
    refs.push_back(metric_tokens(detokenize(gold, vocab)));
  }
  o.require(exact == ex.size(), std::to_string(exact) + "/" + std::to_string(ex.size()) + " exact");
  const double b1 = bleu(cands, refs, 1);
  o.require(b1 == 1.0, "BLEU-1 " + std::to_string(b1));
  const double secs = seconds_since(t0);
  o.require(secs < 300.0, "took too long");
  char buf[200];
  std::snprintf(buf, sizeof buf, "%d steps, lm %.4f, acc %.2f, exact %zu/%zu, BLEU-1 %.3f, %.1fs",
                r.steps, lm, acc, exact, ex.size(), b1, secs);
  if (o.pass) o.detail = buf;
  return o;
}

// ---- AC6 -----------------------------------------------------------------

Outcome auxiliary_loss_helps_classifier() {
  Outcome o;
  const auto t0 = Clock::now();
  const auto tr = synthetic::annotated(200, 11);
  const auto va = synthetic::annotated(50, 12);
  const Vocab vocab = build_vocab(tr, 1);
  const auto train_ex = make_examples(tr, vocab, {});
  const auto val_ex = make_examples(va, vocab, {});
  ModelConfig mc;
  mc.vocab_size = vocab.size();

  double acc[2] = {0, 0}, probe[2] = {0, 0}, ppl[2] = {0, 0};
  for (int aux = 1; aux >= 0; --aux) {
    TrainConfig tc = TrainConfig::desk();
    tc.epochs = 1000;
    tc.max_steps = 300;
    tc.seed = 3;
    tc.use_auxiliary = aux == 1;
    const auto r = train(train_ex, val_ex, tc, mc);
    const Seq2SeqModel<double> m(mc, r.final_params);
    acc[aux] = classifier_accuracy(m, val_ex);
    ppl[aux] = perplexity(m, val_ex);
    probe[aux] = classifier_accuracy(train_probe(m, train_ex, 300, 1e-3, 5), val_ex);
  }
  o.require(acc[1] > 0.9, "aux val accuracy " + std::to_string(acc[1]));
  const double secs = seconds_since(t0);
  char buf[240];
  std::snprintf(buf, sizeof buf,
                "val acc aux %.3f / no-aux %.3f; probe aux %.3f / no-aux %.3f; "
                "val ppl aux %.2f / no-aux %.2f; %.1fs",
                acc[1], acc[0], probe[1], probe[0], ppl[1], ppl[0], secs);
  if (o.pass) o.detail = buf;
  return o;
}

// ---- AC7 -----------------------------------------------------------------

Outcome cli_pipeline() {
  Outcome o;
  testutil::TempDir dir("acceptance_cli");
  const std::string out = dir.str() + "/run";
  nlohmann::ordered_json cfg;
  cfg["paths"] = {{"raw", testutil::fixture("dialogues_1000.jsonl")},
                  {"lexicon", testutil::fixture("medical_wordlist.txt")},
                  {"out_dir", out}};
  testutil::write(dir.file("config.json"), cfg.dump(2));
  const std::string args = "prepare --config " + dir.file("config.json");

  o.require(testutil::run_cli(args, dir.file("log")) == 0, "prepare failed");
  const size_t sizes[3] = {read_lines(out + "/train.jsonl").size(), read_lines(out + "/val.jsonl").size(),
                           read_lines(out + "/test.jsonl").size()};
  o.require(sizes[0] == 900 && sizes[1] == 50 && sizes[2] == 50,
            "split " + std::to_string(sizes[0]) + "/" + std::to_string(sizes[1]) + "/" +
                std::to_string(sizes[2]));
  std::string first;
  for (const char* f : {"/train.jsonl", "/val.jsonl", "/test.jsonl", "/stats.json", "/stats.txt"}) {
    first += testutil::slurp(out + f);
  }
  o.require(testutil::run_cli(args, dir.file("log")) == 0, "second prepare failed");
  std::string second;
  for (const char* f : {"/train.jsonl", "/val.jsonl", "/test.jsonl", "/stats.json", "/stats.txt"}) {
    second += testutil::slurp(out + f);
  }
  o.require(first == second, "reruns differ");
  const std::string table = testutil::slurp(out + "/stats.txt");
  for (const auto& label : stats_row_labels()) {
    o.require(table.find(label) != std::string::npos, "missing row " + label);
  }

  // References echoed as candidates exercise the evaluate path end to end.
  std::vector<ResponseRecord> responses;
  for (const auto& p : read_annotated_jsonl(out + "/test.jsonl")) {
    responses.push_back({p.id, p.tgt_text, p.tgt_text});
  }
  write_responses_jsonl(dir.file("responses.jsonl"), responses);
  o.require(testutil::run_cli("evaluate --responses " + dir.file("responses.jsonl") + " --lexicon " +
                                  testutil::fixture("medical_wordlist.txt") + " --out-dir " + out,
                              dir.file("log")) == 0,
            "evaluate failed");
  const std::string report_text = testutil::slurp(out + "/report.json");
  o.require(!report_text.empty(), "no report.json");
  if (!report_text.empty()) {
    const auto report = nlohmann::json::parse(report_text);
    for (const auto& col : metric_columns()) o.require(report.contains(col), "missing column " + col);
    o.require(report.value("B-1", 0.0) == 1.0, "echoed responses should score BLEU-1 of 1");
  }
  if (o.pass) o.detail = "900/50/50, reruns identical, all rows and columns present";
  return o;
}

// ---- AC8 -----------------------------------------------------------------

std::string synthetic_word(uint64_t k) {
  std::string w = "z";
  do {
    w += static_cast<char>('a' + k % 26);
    k /= 26;
  } while (k);
  return w;
}

Outcome annotation_throughput() {
  Outcome o;
  constexpr size_t kTerms = 60000;
  std::vector<std::string> entries;
  for (size_t k = 0; k < kTerms; ++k) entries.push_back(synthetic_word(k));
  const Lexicon lex = Lexicon::from_terms(entries);
  o.require(lex.size() == kTerms, "lexicon size");

  Rng rng(12);
  const auto& fillers = synthetic::fillers();
  auto text = [&](size_t words) {
    std::string s;
    for (size_t i = 0; i < words; ++i) {
      if (i) s += ' ';
      s += rng.uniform() < 0.2 ? entries[rng.below(kTerms)] : fillers[rng.below(fillers.size())];
      if (rng.uniform() < 0.05) s += ',';
    }
    return s;
  };
  std::vector<DialoguePair> pairs;
  size_t words = 0;
  while (words < 1000000) {
    DialoguePair p;
    p.id = "p" + std::to_string(pairs.size());
    p.input_utterances = {{Speaker::kPatient, text(30)}, {Speaker::kPatient, text(10)}};
    p.target_utterances = {{Speaker::kDoctor, text(20)}};
    words += 60;
    pairs.push_back(std::move(p));
  }

  const auto t0 = Clock::now();
  const auto single = annotate_corpus(pairs, lex, 1);
  const double secs = seconds_since(t0);
  size_t tokens = 0;
  for (const auto& p : single) tokens += p.src.tokens.size() + p.tgt.tokens.size();
  o.require(tokens >= 1000000, "only " + std::to_string(tokens) + " tokens");
  o.require(secs < 10.0, "single thread took " + std::to_string(secs) + "s");

  std::string a;
  for (const auto& p : single) a += annotated_record_line(p) + "\n";
  const auto t1 = Clock::now();
  const auto multi = annotate_corpus(pairs, lex, 4);
  const double msecs = seconds_since(t1);
  std::string b;
  for (const auto& p : multi) b += annotated_record_line(p) + "\n";
  o.require(a == b, "multi-thread output differs");

  char buf[200];
  std::snprintf(buf, sizeof buf, "%zu terms, %zu tokens: 1 thread %.2fs, 4 threads %.2fs, identical",
                lex.size(), tokens, secs, msecs);
  if (o.pass) o.detail = buf;
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"AC1", annotation_matches_reference},
      {"AC2", records_round_trip},
      {"AC3", metrics_match_reference},
      {"AC4", gradients_match_finite_differences},
      {"AC5", overfits_small_set},
      {"AC6", auxiliary_loss_helps_classifier},
      {"AC7", cli_pipeline},
      {"AC8", annotation_throughput},
  };
  int failures = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    std::printf("%s %s %s\n", name, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
    failures += !o.pass;
  }
  return failures == 0 ? 0 : 1;
}
