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

#ifndef TERMDIALOG_DIALOGUE_H_
#define TERMDIALOG_DIALOGUE_H_

#include <string>
#include <vector>

namespace termdialog {

enum class Speaker { kPatient, kDoctor };

struct Utterance {
  Speaker speaker = Speaker::kPatient;
  std::string text;

  bool operator==(const Utterance&) const = default;
};

// One training example: X is the dialogue history ending with the patient's
// question, Y is the doctor's response.
struct DialoguePair {
  std::string id;
  std::vector<Utterance> input_utterances;
  std::vector<Utterance> target_utterances;

  bool operator==(const DialoguePair&) const = default;
};

// Utterances are joined with '\n' so utterance boundaries survive in the
// single-string record form while tokenizing like ordinary whitespace.
std::string join_utterances(const std::vector<Utterance>& utterances);
std::vector<Utterance> split_utterances(const std::string& text,
                                        Speaker speaker);

}  // namespace termdialog

#endif  // TERMDIALOG_DIALOGUE_H_
