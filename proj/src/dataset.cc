// Copyright 2026 The fdp-engine Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "fdp/dataset.h"

#include <cmath>
#include <fstream>
#include <sstream>

#include "absl/status/status.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_split.h"
#include "absl/strings/strip.h"
#include "fdp/rng.h"

namespace fdp {

absl::StatusOr<Dataset> ParseCsv(const std::string& text) {
  Dataset data;
  std::istringstream in(text);
  std::string line;
  size_t columns = 0;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    absl::string_view view = absl::StripAsciiWhitespace(line);
    if (view.empty()) continue;
    std::vector<absl::string_view> cells = absl::StrSplit(view, ',');
    if (columns == 0) {
      columns = cells.size();
      if (columns < 2) {
        return absl::InvalidArgumentError(
            "CSV needs at least one feature column and a label column.");
      }
      continue;
    }
    if (cells.size() != columns) {
      return absl::InvalidArgumentError(absl::StrFormat(
          "line %d has %d cells, expected %d.", line_no, cells.size(),
          columns));
    }
    std::vector<double> row(columns);
    for (size_t j = 0; j < columns; ++j) {
      if (!absl::SimpleAtod(absl::StripAsciiWhitespace(cells[j]), &row[j])) {
        return absl::InvalidArgumentError(absl::StrFormat(
            "line %d: '%s' is not a number.", line_no, cells[j]));
      }
    }
    data.labels.push_back(row.back());
    row.pop_back();
    data.features.push_back(std::move(row));
  }
  if (data.size() == 0) return absl::InvalidArgumentError("CSV has no rows.");
  return data;
}

absl::StatusOr<Dataset> LoadCsv(const std::string& path) {
  std::ifstream file(path);
  if (!file) {
    return absl::NotFoundError(absl::StrFormat("cannot open '%s'.", path));
  }
  std::stringstream buffer;
  buffer << file.rdbuf();
  return ParseCsv(buffer.str());
}

Dataset MakeLinearData(int64_t n, double slope, double intercept) {
  Dataset data;
  for (int64_t i = 0; i < n; ++i) {
    const double x = n == 1 ? 0.0 : -1.0 + 2.0 * i / (n - 1);
    data.features.push_back({x});
    data.labels.push_back(slope * x + intercept);
  }
  return data;
}

Dataset MakeBlobs(int64_t n, double margin, uint64_t seed) {
  Dataset data;
  Philox rng(seed, 0);
  const double center = margin / std::sqrt(2.0);
  for (int64_t i = 0; i < n; ++i) {
    const double label = i % 2 == 0 ? 0.0 : 1.0;
    const double sign = label == 0.0 ? -1.0 : 1.0;
    double x, y;
    do {
      x = sign * center + rng.NextNormal();
      y = sign * center + rng.NextNormal();
      // Projection on the (1,1)/sqrt(2) axis must clear half the margin.
    } while (sign * (x + y) / std::sqrt(2.0) < margin / 2.0);
    data.features.push_back({x, y});
    data.labels.push_back(label);
  }
  return data;
}

}  // namespace fdp
