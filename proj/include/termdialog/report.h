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

#ifndef TERMDIALOG_REPORT_H_
#define TERMDIALOG_REPORT_H_

#include <string>
#include <vector>

#include "json.hpp"
#include "termdialog/metrics.h"

namespace termdialog {

// Column names in presentation order: PPL, B-1..B-4, R-1, R-2, R-L,
// Dist-1..Dist-4.
const std::vector<std::string>& metric_columns();

// Presentation scale: ROUGE x100, BLEU and Distinct in [0, 1]. PPL is null
// when no NLLs were supplied. Extra keys: "Distinct-Terms", "n_responses",
// and "_meta" notes.
nlohmann::ordered_json report_to_json(const MetricReport& report);

// Aligned two-row table (header, values) followed by the distinct-term count.
std::string format_report_table(const MetricReport& report);

}  // namespace termdialog

#endif  // TERMDIALOG_REPORT_H_
