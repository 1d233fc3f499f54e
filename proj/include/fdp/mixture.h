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

// Mixtures of Gaussian trade-off curves and their tail-based bounds.

#ifndef FDP_MIXTURE_H_
#define FDP_MIXTURE_H_

#include <optional>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/types/span.h"
#include "fdp/tradeoff.h"

namespace fdp {

struct MixtureComponent {
  double c = 0.0;
  double q = 0.0;
};

// Distribution over shift magnitudes c. A component with c = 0 stands for the
// identity curve 1 - alpha. Components are sorted by c and distinct.
struct MixtureSpec {
  std::vector<MixtureComponent> components;
  double sigma = 1.0;
};

// Sorts by c, merges equal c, drops zero masses and validates.
absl::StatusOr<MixtureSpec> MakeMixture(std::vector<MixtureComponent> comps,
                                        double sigma);

absl::Status ValidateMixture(const MixtureSpec& spec);

enum class TailSide { kLower, kUpper };

// Lower: at most `mass` of q sits above c_star. Upper: at most `mass` sits
// below c_star.
struct TailParams {
  TailSide side = TailSide::kLower;
  double c_star = 0.0;
  double mass = 0.0;
};

absl::Status ValidateTail(const TailParams& tail, const MixtureSpec& spec);

// Lambda(alpha) solving 1 - alpha = sum_i q_i Phi(Lambda/mu_i + mu_i/2),
// mu_i = c_i / sigma. Returns +inf at alpha = 0 and -inf at alpha = 1. A mass
// at c = 0 produces a flat stretch where Lambda = 0.
absl::StatusOr<double> SolveLambda(const MixtureSpec& spec, double alpha);

absl::StatusOr<double> MixtureTradeoff(const MixtureSpec& spec, double alpha);

absl::StatusOr<TradeoffCurve> MixtureCurve(
    const MixtureSpec& spec,
    absl::Span<const double> alphas = DefaultAlphaGrid());

// Unique beta with G_{c/sigma}(beta) - l = beta.
absl::StatusOr<double> LowerBoundBeta(const TailParams& tail, double sigma);

struct UpperKnots {
  double beta0 = 0.0;
  double beta1 = 0.0;
};

absl::StatusOr<UpperKnots> UpperBoundKnots(const TailParams& tail,
                                           double sigma);

// G_{c/sigma}(min{1, alpha + l}).
double LowerHatEval(const TailParams& tail, double sigma, double alpha);

// u + (1 - u) G_{c/sigma}(alpha).
double UpperHatEval(const TailParams& tail, double sigma, double alpha);

// Symmetrized lower bound max{G(alpha) - l, G(min{1, alpha + l})}.
absl::StatusOr<double> LowerBoundEval(const TailParams& tail, double sigma,
                                      double alpha);

// Three-piece upper bound joined by a slope -1 segment on [beta0, beta1].
absl::StatusOr<double> UpperBoundEval(const TailParams& tail, double sigma,
                                      double alpha);

// Grid curves sampled at `alphas` plus the knots of the piecewise form.
absl::StatusOr<TradeoffCurve> LowerBoundCurve(
    const TailParams& tail, double sigma,
    absl::Span<const double> alphas = DefaultAlphaGrid());
absl::StatusOr<TradeoffCurve> UpperBoundCurve(
    const TailParams& tail, double sigma,
    absl::Span<const double> alphas = DefaultAlphaGrid());

struct SandwichReport {
  double max_violation = 0.0;
  double argmax_alpha = 0.0;
  // Which inequality of the chain was worst, e.g. "lower<=exact".
  std::string pair;
};

// Checks lower_hat <= lower <= f <= upper <= upper_hat on `alphas`. Violations
// are reported, not raised.
absl::StatusOr<SandwichReport> SandwichCheck(
    const MixtureSpec& spec, const TailParams& lower,
    const std::optional<TailParams>& upper,
    absl::Span<const double> alphas = UniformAlphaGrid(1001));

}  // namespace fdp

#endif  // FDP_MIXTURE_H_
