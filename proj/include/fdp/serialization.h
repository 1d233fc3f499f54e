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

// JSON and CSV encodings shared by the command-line tool and the tests.

#ifndef FDP_SERIALIZATION_H_
#define FDP_SERIALIZATION_H_

#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/types/span.h"
#include "fdp/guarantee.h"
#include "fdp/mixture.h"
#include "fdp/oracle.h"
#include "fdp/sampling.h"
#include "fdp/tradeoff.h"
#include "fdp/trainer.h"
#include "json.hpp"

namespace fdp {

using Json = nlohmann::ordered_json;

// 12 significant digits, dot decimal separator.
std::string FormatDouble(double x);

// x rounded to 12 significant digits, so that JSON dumps stay short.
double Round12(double x);

Json CurveToJson(const TradeoffCurve& curve);
absl::StatusOr<TradeoffCurve> CurveFromJson(const Json& json);
std::string CurveToCsv(const TradeoffCurve& curve,
                       absl::Span<const double> alphas);

Json MixtureToJson(const MixtureSpec& spec);
absl::StatusOr<MixtureSpec> MixtureFromJson(const Json& json);

Json TailToJson(const TailParams& tail);
Json SandwichToJson(const SandwichReport& report);
Json CVecDistToJson(const CVecDist& dist);
std::string CVecDistToCsv(const CVecDist& dist);
Json SamplerConfigToJson(const SamplerConfig& config);

// Curves are written in full; `alphas` picks the CSV rows.
Json BundleToJson(const GuaranteeBundle& bundle);
std::string BundleToCsv(const GuaranteeBundle& bundle,
                        absl::Span<const double> alphas);

std::string GroupComparisonToCsv(const GroupComparison& cmp);

std::string MetricsToCsv(const std::vector<EpochMetrics>& metrics);
Json ModelToJson(const Model& model);

// Fields mirror TrainConfig and SamplerConfig; unknown keys are rejected.
absl::StatusOr<TrainConfig> TrainConfigFromJson(const Json& json);

Json OracleReportToJson(const std::vector<OracleCheck>& checks);

}  // namespace fdp

#endif  // FDP_SERIALIZATION_H_
