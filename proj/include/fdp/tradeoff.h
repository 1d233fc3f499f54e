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

// Trade-off curves and the operators acting on them.

#ifndef FDP_TRADEOFF_H_
#define FDP_TRADEOFF_H_

#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/types/span.h"

namespace fdp {

enum class CurveKind { kGaussian, kGrid };

// A non-increasing function on [0,1]. Either the Gaussian curve G_mu, held
// analytically, or a piecewise-linear interpolant through (alpha_i, beta_i)
// with alpha_0 = 0 and alpha_n = 1.
class TradeoffCurve {
 public:
  // The identity curve 1 - alpha, i.e. G_0.
  TradeoffCurve() = default;

  static absl::StatusOr<TradeoffCurve> Gaussian(double mu);

  // Checks only the shape of the data: equal lengths, strictly ascending
  // alphas spanning [0,1], betas in [0,1]. Use ValidateTradeoff for the
  // convexity and monotonicity invariants.
  static absl::StatusOr<TradeoffCurve> Grid(std::vector<double> alphas,
                                            std::vector<double> betas,
                                            bool symmetric = false);

  // Samples `curve` at `alphas`.
  static TradeoffCurve Sampled(const TradeoffCurve& curve,
                               absl::Span<const double> alphas);

  CurveKind kind() const { return kind_; }
  bool is_gaussian() const { return kind_ == CurveKind::kGaussian; }
  double mu() const { return mu_; }
  const std::vector<double>& alphas() const { return alphas_; }
  const std::vector<double>& betas() const { return betas_; }
  bool symmetric() const { return symmetric_; }

  // alpha is clamped to [0,1].
  double Eval(double alpha) const;

  // 1 - Eval(alpha), computed without cancellation for the Gaussian kind.
  double EvalComplement(double alpha) const;

 private:
  CurveKind kind_ = CurveKind::kGaussian;
  double mu_ = 0.0;
  std::vector<double> alphas_;
  std::vector<double> betas_;
  bool symmetric_ = true;
};

struct EpsDelta {
  double epsilon = 0.0;
  double delta = 0.0;
};

struct DivergenceSummary {
  double rdp_order = 2.0;
  double rdp_eps = 0.0;
  double zcdp_rho = 0.0;
  double tcdp_rho = 0.0;
  double tcdp_omega = 2.0;
};

// n >= 2 equally spaced points on [0,1].
std::vector<double> UniformAlphaGrid(int n);

// Uniform 4097 points merged with 50-per-decade geometric points on
// [1e-12, 0.1] and their mirror images near 1. Most of the curvature of a
// Gaussian curve sits next to the endpoints.
const std::vector<double>& DefaultAlphaGrid();

// G_mu(alpha) with no argument checks. Callers guarantee mu >= 0.
double GaussianTradeoff(double mu, double alpha);

absl::StatusOr<double> GaussianEval(double mu, double alpha);

// Checks f(0) <= 1, f(1) >= 0, monotonicity, convexity, f(alpha) <= 1 - alpha
// on the grid nodes, each up to `tolerance`.
absl::Status ValidateTradeoff(const TradeoffCurve& f, double tolerance = 1e-9);

// h^{-1}(alpha) = inf{t : h(t) <= alpha}. Gaussian curves map to themselves.
TradeoffCurve CurveInverse(const TradeoffCurve& f);

// Greatest convex minorant, evaluated back on the input alphas.
TradeoffCurve Convexify(const TradeoffCurve& f);

// Pointwise min of two curves sampled on `alphas`.
TradeoffCurve PointwiseMin(const TradeoffCurve& a, const TradeoffCurve& b,
                           absl::Span<const double> alphas);

// min{f_p, f_p^{-1}}** with f_p = p f + (1 - p)(1 - alpha).
absl::StatusOr<TradeoffCurve> SubsampleOperator(
    const TradeoffCurve& f, double p,
    absl::Span<const double> alphas = DefaultAlphaGrid());

absl::StatusOr<double> ComposeGaussians(absl::Span<const double> mus);

// 1 - (1 - f)^{o g}, iterated pointwise at the grid nodes. Gaussian input
// maps to G_{g mu} in closed form.
absl::StatusOr<TradeoffCurve> GroupIterate(const TradeoffCurve& f, int g);

// Closed form for Gaussian curves. For grids, the largest intercept
// 1 - f(alpha) - e^eps alpha over the nodes, clamped to [0,1].
absl::StatusOr<double> DeltaOfEpsilon(const TradeoffCurve& f, double epsilon);

// Closed form only; mu = 0 gives 0.
double GaussianDelta(double mu, double epsilon);

// max{0, 1 - delta - e^eps alpha, (1 - delta - alpha) e^-eps}.
absl::StatusOr<TradeoffCurve> FEpsDeltaCurve(double epsilon, double delta);

absl::StatusOr<DivergenceSummary> GdpToDivergences(double mu,
                                                   double omega = 2.0);

}  // namespace fdp

#endif  // FDP_TRADEOFF_H_
