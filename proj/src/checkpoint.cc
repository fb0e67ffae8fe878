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

#include "termdialog/model/checkpoint.h"

#include "termdialog/error.h"
#include "termdialog/records.h"

namespace termdialog {
namespace {

using ojson = nlohmann::ordered_json;
constexpr const char* kFormat = "termdialog-checkpoint";

}  // namespace

ojson model_config_to_json(const ModelConfig& c) {
  ojson j;
  j["vocab_size"] = c.vocab_size;
  j["d_model"] = c.d_model;
  j["n_heads"] = c.n_heads;
  j["n_enc_layers"] = c.n_enc_layers;
  j["n_dec_layers"] = c.n_dec_layers;
  j["ffn_dim"] = c.ffn_dim;
  j["max_len"] = c.max_len;
  j["dropout"] = c.dropout;
  return j;
}

ModelConfig model_config_from_json(const ojson& j) {
  ModelConfig c;
  c.vocab_size = j.value("vocab_size", c.vocab_size);
  c.d_model = j.value("d_model", c.d_model);
  c.n_heads = j.value("n_heads", c.n_heads);
  c.n_enc_layers = j.value("n_enc_layers", c.n_enc_layers);
  c.n_dec_layers = j.value("n_dec_layers", c.n_dec_layers);
  c.ffn_dim = j.value("ffn_dim", c.ffn_dim);
  c.max_len = j.value("max_len", c.max_len);
  c.dropout = j.value("dropout", c.dropout);
  return c;
}

ojson checkpoint_to_json(const Checkpoint& ckpt) {
  ojson doc;
  doc["format"] = kFormat;
  doc["version"] = kCheckpointVersion;
  doc["model_config"] = model_config_to_json(ckpt.config);
  doc["example_options"] = {
      {"max_len", ckpt.example_options.max_len},
      {"classify_on_markers", ckpt.example_options.classify_on_markers}};
  doc["vocab"] = ckpt.vocab.tokens();
  ojson tensors = ojson::object();
  for (const auto& t : ckpt.params.tensors()) {
    const Matrix<double>& m = *t.tensor;
    ojson entry;
    entry["shape"] = {m.rows(), m.cols()};
    entry["data"] = std::vector<double>(m.data(), m.data() + m.size());
    tensors[t.name] = std::move(entry);
  }
  doc["tensors"] = std::move(tensors);
  return doc;
}

Checkpoint checkpoint_from_json(const ojson& doc) {
  try {
    if (doc.value("format", std::string()) != kFormat) {
      throw ValidationError("not a termdialog checkpoint");
    }
    const int version = doc.at("version").get<int>();
    if (version != kCheckpointVersion) {
      throw ValidationError("unsupported checkpoint version " + std::to_string(version));
    }
    Checkpoint ckpt;
    ckpt.config = model_config_from_json(doc.at("model_config"));
    const auto& ex = doc.at("example_options");
    ckpt.example_options.max_len = ex.at("max_len").get<int>();
    ckpt.example_options.classify_on_markers = ex.at("classify_on_markers").get<bool>();
    ckpt.vocab = Vocab::from_tokens(doc.at("vocab").get<std::vector<std::string>>());
    if (ckpt.vocab.size() != ckpt.config.vocab_size) {
      throw ValidationError("checkpoint vocabulary size does not match its config");
    }
    ckpt.params = ModelParams<double>::zeros(ckpt.config);
    const auto& tensors = doc.at("tensors");
    auto named = ckpt.params.tensors();
    if (tensors.size() != named.size()) {
      throw ValidationError("checkpoint tensor count mismatch");
    }
    for (auto& t : named) {
      const auto& entry = tensors.at(t.name);
      const auto shape = entry.at("shape").get<std::vector<long>>();
      if (shape.size() != 2 || shape[0] != t.tensor->rows() || shape[1] != t.tensor->cols()) {
        throw ValidationError("checkpoint tensor " + t.name + " has the wrong shape");
      }
      const auto data = entry.at("data").get<std::vector<double>>();
      if (static_cast<Eigen::Index>(data.size()) != t.tensor->size()) {
        throw ValidationError("checkpoint tensor " + t.name + " has the wrong size");
      }
      std::copy(data.begin(), data.end(), t.tensor->data());
    }
    return ckpt;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed checkpoint: ") + e.what());
  }
}

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  write_file(path, checkpoint_to_json(ckpt).dump() + "\n");
}

Checkpoint load_checkpoint(const std::string& path) {
  const std::string text = read_file(path);
  const ojson doc = ojson::parse(text, nullptr, false);
  if (doc.is_discarded()) throw ValidationError("checkpoint is not valid JSON: " + path);
  return checkpoint_from_json(doc);
}

}  // namespace termdialog
