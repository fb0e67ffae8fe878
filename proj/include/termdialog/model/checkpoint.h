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

#ifndef TERMDIALOG_MODEL_CHECKPOINT_H_
#define TERMDIALOG_MODEL_CHECKPOINT_H_

#include <string>

#include "json.hpp"
#include "termdialog/model/data.h"
#include "termdialog/model/transformer.h"
#include "termdialog/vocab.h"

namespace termdialog {

inline constexpr int kCheckpointVersion = 1;

struct Checkpoint {
  ModelConfig config;
  Vocab vocab;
  ExampleOptions example_options;
  ModelParams<double> params;
};

// JSON container:
// {"format": "termdialog-checkpoint", "version": 1, "model_config": {...},
//  "example_options": {...}, "vocab": [...],
//  "tensors": {name: {"shape": [rows, cols], "data": [...]}}}
// Tensors are stored row-major with round-trip double precision, so equal
// parameters give byte-identical files.
nlohmann::ordered_json checkpoint_to_json(const Checkpoint& ckpt);
Checkpoint checkpoint_from_json(const nlohmann::ordered_json& doc);

void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
// Throws LoadError / ValidationError on unreadable, mismatched or
// wrong-version files.
Checkpoint load_checkpoint(const std::string& path);

nlohmann::ordered_json model_config_to_json(const ModelConfig& c);
ModelConfig model_config_from_json(const nlohmann::ordered_json& j);

}  // namespace termdialog

#endif  // TERMDIALOG_MODEL_CHECKPOINT_H_
