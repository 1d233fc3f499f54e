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

// Single-client DP-SGD with individual, batch and general clipping.

#ifndef FDP_TRAINER_H_
#define FDP_TRAINER_H_

#include <cstdint>
#include <vector>

#include "absl/status/statusor.h"
#include "fdp/dataset.h"
#include "fdp/rng.h"
#include "fdp/sampling.h"

namespace fdp {

enum class LossKind { kSquared, kLogistic };
enum class InnerMode { kIcGrad, kBcMean, kSgdRecursion };
enum class NoiseScale { kTwoC, kOneC };

struct Model {
  // Last entry is the bias; features are augmented with a constant 1.
  std::vector<double> weights;
  LossKind loss = LossKind::kSquared;
};

struct TrainConfig {
  SamplerConfig sampler;
  double sigma = 0.0;
  double clip_C = 1.0;
  double eta0 = 0.025;
  double lr_decay = 0.9;
  // 0 means sampler.E.
  int64_t epochs = 0;
  uint64_t seed = 0;
  NoiseScale noise_scale = NoiseScale::kTwoC;
  LossKind loss = LossKind::kSquared;
  InnerMode inner = InnerMode::kBcMean;
  // Step size of the local recursion in kSgdRecursion.
  double inner_eta = 0.0;
};

struct EpochMetrics {
  int64_t epoch = 0;
  double loss = 0.0;
  // Classification accuracy for logistic loss, R^2 for squared loss.
  double accuracy = 0.0;
  double eta = 0.0;
};

struct TrainResult {
  Model model;
  std::vector<EpochMetrics> metrics;
};

struct RoundUpdate {
  std::vector<double> U;
  std::vector<double> U_noised;
  int64_t k_diff = 0;
};

// Rounds of m index sets of size s each.
using Round = std::vector<std::vector<int64_t>>;

std::vector<Round> SampleEpoch(const SamplerConfig& config, Philox& rng);

std::vector<double> Clip(const std::vector<double>& x, double C);

// Per-example gradient with respect to the augmented weights.
std::vector<double> Gradient(const Model& model,
                             const std::vector<double>& features,
                             double label);
double Loss(const Model& model, const std::vector<double>& features,
            double label);

std::vector<double> InnerAlgorithm(InnerMode mode, const Model& model,
                                   const Dataset& data,
                                   const std::vector<int64_t>& subset,
                                   double eta);

// Mean loss and accuracy over the dataset.
EpochMetrics Evaluate(const Model& model, const Dataset& data);

absl::Status ValidateTrainConfig(const TrainConfig& config);

Model InitialModel(const TrainConfig& config, size_t dim);

// U = sum_h [a_h]_C and U + N(0, s^2 I) with s = 2C sigma (or C sigma).
RoundUpdate ComputeRound(const TrainConfig& config, const Model& model,
                         const Dataset& data, const Round& round,
                         Philox& noise);

// `test` may be null, in which case the schedule watches training accuracy.
absl::StatusOr<TrainResult> Train(const TrainConfig& config,
                                  const Dataset& data,
                                  const Dataset* test = nullptr);

// Runs one round on two datasets that differ in a few rows, sharing the
// sampling and inner randomness. U and U' are the pre-noise sums; k counts the
// subsets holding a differing row.
struct PairedUpdate {
  std::vector<double> U;
  std::vector<double> U_prime;
  int64_t k = 0;
};

absl::StatusOr<PairedUpdate> PairedRoundUpdate(const TrainConfig& config,
                                               const Model& model,
                                               const Dataset& d,
                                               const Dataset& d_prime,
                                               uint64_t shared_seed,
                                               int64_t round);

}  // namespace fdp

#endif  // FDP_TRAINER_H_
