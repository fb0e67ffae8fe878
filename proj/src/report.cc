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

#include "termdialog/report.h"

#include <cstdio>
#include <sstream>

namespace termdialog {
namespace {

std::vector<double> presented_values(const MetricReport& r) {
  return {r.ppl.value_or(std::nan("")),
          r.bleu[0], r.bleu[1], r.bleu[2], r.bleu[3],
          100.0 * r.rouge_1, 100.0 * r.rouge_2, 100.0 * r.rouge_l,
          r.distinct[0], r.distinct[1], r.distinct[2], r.distinct[3]};
}

}  // namespace

const std::vector<std::string>& metric_columns() {
  static const std::vector<std::string> columns = {
      "PPL", "B-1", "B-2", "B-3", "B-4", "R-1", "R-2", "R-L",
      "Dist-1", "Dist-2", "Dist-3", "Dist-4"};
  return columns;
}

nlohmann::ordered_json report_to_json(const MetricReport& report) {
  nlohmann::ordered_json j;
  const auto values = presented_values(report);
  const auto& columns = metric_columns();
  for (size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == "PPL" && !report.ppl) {
      j[columns[i]] = nullptr;
    } else {
      j[columns[i]] = values[i];
    }
  }
  j["Distinct-Terms"] = report.distinct_term_count;
  j["n_responses"] = report.n_responses;
  j["_meta"] = {
      {"rouge_scale", 100},
      {"bleu", "corpus-level, uniform weights, no smoothing"},
      {"rouge", "F1, mean over pairs"},
      {"distinct", "corpus-level unique/total n-grams"},
      {"ppl", "exp(mean token NLL in nats); not comparable across vocabularies"}};
  return j;
}

std::string format_report_table(const MetricReport& report) {
  const auto values = presented_values(report);
  const auto& columns = metric_columns();
  std::vector<std::string> cells;
  char buf[64];
  for (size_t i = 0; i < values.size(); ++i) {
    if (i == 0 && !report.ppl) {
      cells.emplace_back("-");
    } else {
      std::snprintf(buf, sizeof(buf), "%.4f", values[i]);
      cells.emplace_back(buf);
    }
  }
  std::ostringstream header, row;
  for (size_t i = 0; i < columns.size(); ++i) {
    const size_t w = std::max(columns[i].size(), cells[i].size());
    if (i > 0) {
      header << " | ";
      row << " | ";
    }
    header << std::string(w - columns[i].size(), ' ') << columns[i];
    row << std::string(w - cells[i].size(), ' ') << cells[i];
  }
  std::ostringstream out;
  out << header.str() << '\n' << row.str() << '\n'
      << "Distinct terminology phrases: " << report.distinct_term_count << '\n';
  return out.str();
}

}  // namespace termdialog
