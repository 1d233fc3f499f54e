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

// Maps a sampler configuration to its trade-off guarantees.

#ifndef FDP_GUARANTEE_H_
#define FDP_GUARANTEE_H_

#include <optional>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "fdp/mixture.h"
#include "fdp/sampling.h"
#include "fdp/tradeoff.h"

namespace fdp {

struct GuaranteeOptions {
  // Tail exponent for individual clipping with subsampling and g >= 2.
  // Non-positive selects 1/g.
  double gamma = 0.0;
  double omega = 2.0;
  std::vector<double> epsilons = {0.1, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0};
  double eps_trunc = kDefaultTruncation;
  std::vector<double> alphas = DefaultAlphaGrid();
};

struct GuaranteeBundle {
  SamplerConfig config;
  double sigma = 1.0;
  // Short label of the matched row, e.g. "bc-sh g<=s".
  std::string row;
  std::optional<TradeoffCurve> exact_f;
  std::optional<MixtureSpec> exact_mixture;
  TradeoffCurve lower;
  std::optional<TradeoffCurve> upper;
  std::optional<TailParams> lower_tail;
  std::optional<TailParams> upper_tail;
  // Set when the upper tail was clamped (E_eff <= 1/2).
  bool degenerate = false;
  double approx_mu = 0.0;
  std::vector<EpsDelta> eps_delta_samples;
  DivergenceSummary divergences;
};

absl::StatusOr<GuaranteeBundle> Analyze(const SamplerConfig& config,
                                        double sigma,
                                        const GuaranteeOptions& options = {});

// Large-N headline parameter. For individual clipping with subsampling and
// g >= 2 it uses the limit e of e^{N/(N-g-m)}; the approx_mu that Analyze
// reports for that row keeps the finite-N factor.
absl::StatusOr<double> HeadlineMu(const SamplerConfig& config, double sigma,
                                  double gamma = 0.0);

struct GroupComparison {
  double direct_mu = 0.0;
  double iterated_mu = 0.0;
  TradeoffCurve direct;
  TradeoffCurve iterated;
  // max over the grid of iterated - direct, floored at 0.
  double max_violation = 0.0;
  bool direct_dominates = true;
};

// Direct group analysis against the g-fold iterate of the g = 1 guarantee.
absl::StatusOr<GroupComparison> CompareGroupPaths(
    const SamplerConfig& config, double sigma,
    const GuaranteeOptions& options = {});

}  // namespace fdp

#endif  // FDP_GUARANTEE_H_
