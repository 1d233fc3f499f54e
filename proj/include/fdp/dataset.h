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

// In-memory labelled datasets: CSV ingestion and two synthetic generators.

#ifndef FDP_DATASET_H_
#define FDP_DATASET_H_

#include <cstdint>
#include <string>
#include <vector>

#include "absl/status/statusor.h"

namespace fdp {

struct Dataset {
  std::vector<std::vector<double>> features;
  std::vector<double> labels;

  size_t size() const { return labels.size(); }
  size_t dim() const { return features.empty() ? 0 : features[0].size(); }
};

// Header row required; the last column is the label.
absl::StatusOr<Dataset> LoadCsv(const std::string& path);
absl::StatusOr<Dataset> ParseCsv(const std::string& text);

// y = slope * x + intercept with x evenly spread on [-1, 1].
Dataset MakeLinearData(int64_t n, double slope, double intercept);

// Two unit-variance Gaussian blobs on the diagonal, labels 0/1 alternating.
// Points whose projection on (1,1)/sqrt(2) lands within margin/2 of zero are
// redrawn, so the classes are separated by a band of width `margin`.
Dataset MakeBlobs(int64_t n, double margin, uint64_t seed);

}  // namespace fdp

#endif  // FDP_DATASET_H_
