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

#include "fdp/tradeoff.h"

#include <algorithm>
#include <cmath>
#include <utility>

#include "absl/strings/str_format.h"
#include "fdp/normal.h"

namespace fdp {
namespace {

bool IsUnitInterval(double x) { return x >= 0.0 && x <= 1.0; }

// Linear interpolation on ascending nodes. alpha is assumed in [0,1].
double InterpolateGrid(const std::vector<double>& xs,
                       const std::vector<double>& ys, double x) {
  if (x <= xs.front()) return ys.front();
  if (x >= xs.back()) return ys.back();
  const auto upper = std::upper_bound(xs.begin(), xs.end(), x);
  const size_t hi = static_cast<size_t>(upper - xs.begin());
  const size_t lo = hi - 1;
  const double t = (x - xs[lo]) / (xs[hi] - xs[lo]);
  return ys[lo] + t * (ys[hi] - ys[lo]);
}

std::vector<double> BuildDefaultGrid() {
  constexpr int kUniformPoints = 4097;
  constexpr int kPerDecade = 50;
  constexpr int kDecades = 11;  // 1e-12 .. 1e-1
  std::vector<double> grid = UniformAlphaGrid(kUniformPoints);
  for (int i = 0; i <= kPerDecade * kDecades; ++i) {
    const double a =
        std::pow(10.0, -12.0 + static_cast<double>(i) / kPerDecade);
    grid.push_back(a);
    grid.push_back(1.0 - a);
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

TradeoffCurve MakeGrid(std::vector<double> alphas, std::vector<double> betas,
                       bool symmetric) {
  // Callers in this file construct well-formed grids.
  return *TradeoffCurve::Grid(std::move(alphas), std::move(betas), symmetric);
}

double Clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

}  // namespace

absl::StatusOr<TradeoffCurve> TradeoffCurve::Gaussian(double mu) {
  if (!(mu >= 0.0) || std::isinf(mu)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("mu should be finite and nonnegative, got %g.", mu));
  }
  TradeoffCurve curve;
  curve.kind_ = CurveKind::kGaussian;
  curve.mu_ = mu;
  curve.symmetric_ = true;
  return curve;
}

absl::StatusOr<TradeoffCurve> TradeoffCurve::Grid(std::vector<double> alphas,
                                                  std::vector<double> betas,
                                                  bool symmetric) {
  if (alphas.size() != betas.size()) {
    return absl::InvalidArgumentError(
        "alphas and betas should have the same length.");
  }
  if (alphas.size() < 2) {
    return absl::InvalidArgumentError("a grid needs at least two points.");
  }
  if (alphas.front() != 0.0 || alphas.back() != 1.0) {
    return absl::InvalidArgumentError("grid alphas should span [0,1].");
  }
  for (size_t i = 0; i < alphas.size(); ++i) {
    if (i > 0 && !(alphas[i] > alphas[i - 1])) {
      return absl::InvalidArgumentError(
          "grid alphas should be strictly ascending.");
    }
    if (!IsUnitInterval(betas[i])) {
      return absl::InvalidArgumentError(absl::StrFormat(
          "grid beta %g at alpha %g is outside [0,1].", betas[i], alphas[i]));
    }
  }
  TradeoffCurve curve;
  curve.kind_ = CurveKind::kGrid;
  curve.alphas_ = std::move(alphas);
  curve.betas_ = std::move(betas);
  curve.symmetric_ = symmetric;
  return curve;
}

TradeoffCurve TradeoffCurve::Sampled(const TradeoffCurve& curve,
                                     absl::Span<const double> alphas) {
  std::vector<double> xs(alphas.begin(), alphas.end());
  std::vector<double> ys(xs.size());
  for (size_t i = 0; i < xs.size(); ++i) ys[i] = curve.Eval(xs[i]);
  return MakeGrid(std::move(xs), std::move(ys), curve.symmetric());
}

double TradeoffCurve::Eval(double alpha) const {
  alpha = Clamp01(alpha);
  if (kind_ == CurveKind::kGaussian) return GaussianTradeoff(mu_, alpha);
  return InterpolateGrid(alphas_, betas_, alpha);
}

double TradeoffCurve::EvalComplement(double alpha) const {
  alpha = Clamp01(alpha);
  if (kind_ == CurveKind::kGaussian) {
    if (alpha == 0.0) return 0.0;
    if (alpha == 1.0) return 1.0;
    if (mu_ == 0.0) return alpha;
    return NormalSurvival(NormalUpperQuantile(alpha) - mu_);
  }
  return 1.0 - InterpolateGrid(alphas_, betas_, alpha);
}

std::vector<double> UniformAlphaGrid(int n) {
  if (n < 2) n = 2;
  std::vector<double> grid(n);
  for (int i = 0; i < n; ++i) {
    grid[i] = static_cast<double>(i) / (n - 1);
  }
  grid.back() = 1.0;
  return grid;
}

const std::vector<double>& DefaultAlphaGrid() {
  static const std::vector<double>* const grid =
      new std::vector<double>(BuildDefaultGrid());
  return *grid;
}

double GaussianTradeoff(double mu, double alpha) {
  if (alpha <= 0.0) return 1.0;
  if (alpha >= 1.0) return 0.0;
  if (mu == 0.0) return 1.0 - alpha;
  return NormalCdf(NormalUpperQuantile(alpha) - mu);
}

absl::StatusOr<double> GaussianEval(double mu, double alpha) {
  if (!(mu >= 0.0)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("mu should be nonnegative, got %g.", mu));
  }
  if (!IsUnitInterval(alpha)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("alpha should be in [0,1], got %g.", alpha));
  }
  return GaussianTradeoff(mu, alpha);
}

absl::Status ValidateTradeoff(const TradeoffCurve& f, double tolerance) {
  if (f.is_gaussian()) return absl::OkStatus();
  const auto& a = f.alphas();
  const auto& b = f.betas();
  const size_t n = a.size();
  for (size_t i = 0; i < n; ++i) {
    if (b[i] > 1.0 - a[i] + tolerance) {
      return absl::FailedPreconditionError(absl::StrFormat(
          "curve exceeds 1 - alpha at alpha = %g (beta = %g).", a[i], b[i]));
    }
    if (i > 0 && b[i] > b[i - 1] + tolerance) {
      return absl::FailedPreconditionError(
          absl::StrFormat("curve increases at alpha = %g.", a[i]));
    }
    if (i > 0 && i + 1 < n) {
      const double t = (a[i] - a[i - 1]) / (a[i + 1] - a[i - 1]);
      const double chord = b[i - 1] + t * (b[i + 1] - b[i - 1]);
      if (b[i] > chord + tolerance) {
        return absl::FailedPreconditionError(
            absl::StrFormat("curve is not convex at alpha = %g.", a[i]));
      }
    }
  }
  return absl::OkStatus();
}

TradeoffCurve CurveInverse(const TradeoffCurve& f) {
  if (f.is_gaussian()) return f;
  const auto& a = f.alphas();
  const auto& b = f.betas();
  std::vector<double> xs;
  std::vector<double> ys;
  xs.reserve(a.size() + 2);
  ys.reserve(a.size() + 2);
  // Walking alpha downwards visits beta in ascending order. A repeated beta
  // keeps its smallest alpha, which is the infimum.
  for (size_t k = a.size(); k-- > 0;) {
    const double x = b[k];
    if (!xs.empty() && x <= xs.back()) {
      ys.back() = a[k];
      continue;
    }
    xs.push_back(x);
    ys.push_back(a[k]);
  }
  if (xs.front() > 0.0) {
    xs.insert(xs.begin(), 0.0);
    ys.insert(ys.begin(), 1.0);
  }
  if (xs.back() < 1.0) {
    xs.push_back(1.0);
    ys.push_back(0.0);
  }
  return MakeGrid(std::move(xs), std::move(ys), f.symmetric());
}

TradeoffCurve Convexify(const TradeoffCurve& f) {
  if (f.is_gaussian()) return f;
  const auto& a = f.alphas();
  const auto& b = f.betas();
  std::vector<size_t> hull;
  hull.reserve(a.size());
  for (size_t i = 0; i < a.size(); ++i) {
    while (hull.size() >= 2) {
      const size_t p = hull[hull.size() - 2];
      const size_t q = hull.back();
      const double cross =
          (a[q] - a[p]) * (b[i] - b[p]) - (b[q] - b[p]) * (a[i] - a[p]);
      if (cross > 0.0) break;
      hull.pop_back();
    }
    hull.push_back(i);
  }
  std::vector<double> ys(a.size());
  size_t seg = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    while (seg + 1 < hull.size() && a[hull[seg + 1]] < a[i]) ++seg;
    if (seg + 1 >= hull.size() || a[hull[seg]] == a[i]) {
      ys[i] = b[hull[seg]];
      continue;
    }
    const size_t lo = hull[seg];
    const size_t hi = hull[seg + 1];
    const double t = (a[i] - a[lo]) / (a[hi] - a[lo]);
    ys[i] = std::min(b[i], b[lo] + t * (b[hi] - b[lo]));
  }
  return MakeGrid(a, std::move(ys), f.symmetric());
}

TradeoffCurve PointwiseMin(const TradeoffCurve& a, const TradeoffCurve& b,
                           absl::Span<const double> alphas) {
  std::vector<double> xs(alphas.begin(), alphas.end());
  std::vector<double> ys(xs.size());
  for (size_t i = 0; i < xs.size(); ++i) {
    ys[i] = std::min(a.Eval(xs[i]), b.Eval(xs[i]));
  }
  return MakeGrid(std::move(xs), std::move(ys),
                  a.symmetric() && b.symmetric());
}

absl::StatusOr<TradeoffCurve> SubsampleOperator(
    const TradeoffCurve& f, double p, absl::Span<const double> alphas) {
  if (!IsUnitInterval(p)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("p should be in [0,1], got %g.", p));
  }
  std::vector<double> xs(alphas.begin(), alphas.end());
  std::vector<double> ys(xs.size());
  for (size_t i = 0; i < xs.size(); ++i) {
    ys[i] = Clamp01(p * f.Eval(xs[i]) + (1.0 - p) * (1.0 - xs[i]));
  }
  absl::StatusOr<TradeoffCurve> fp = TradeoffCurve::Grid(xs, std::move(ys));
  if (!fp.ok()) return fp.status();
  const TradeoffCurve lower = PointwiseMin(*fp, CurveInverse(*fp), xs);
  TradeoffCurve hull = Convexify(lower);
  return TradeoffCurve::Grid(hull.alphas(), hull.betas(), /*symmetric=*/true);
}

absl::StatusOr<double> ComposeGaussians(absl::Span<const double> mus) {
  double sum = 0.0;
  for (double mu : mus) {
    if (!(mu >= 0.0)) {
      return absl::InvalidArgumentError(
          absl::StrFormat("mu should be nonnegative, got %g.", mu));
    }
    sum += mu * mu;
  }
  return std::sqrt(sum);
}

absl::StatusOr<TradeoffCurve> GroupIterate(const TradeoffCurve& f, int g) {
  if (g < 1) {
    return absl::InvalidArgumentError(
        absl::StrFormat("group size should be positive, got %d.", g));
  }
  if (g == 1) return f;
  if (f.is_gaussian()) return TradeoffCurve::Gaussian(g * f.mu());
  const std::vector<double>& xs = f.alphas();
  std::vector<double> ys(xs.size());
  for (size_t i = 0; i < xs.size(); ++i) {
    double x = xs[i];
    for (int step = 1; step < g; ++step) x = f.EvalComplement(x);
    ys[i] = f.Eval(x);
  }
  return TradeoffCurve::Grid(xs, std::move(ys), f.symmetric());
}

double GaussianDelta(double mu, double epsilon) {
  if (mu == 0.0) return 0.0;
  const double delta = NormalCdf(-epsilon / mu + mu / 2.0) -
                       std::exp(epsilon) * NormalCdf(-epsilon / mu - mu / 2.0);
  return Clamp01(delta);
}

absl::StatusOr<double> DeltaOfEpsilon(const TradeoffCurve& f, double epsilon) {
  if (!(epsilon >= 0.0)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("epsilon should be nonnegative, got %g.", epsilon));
  }
  if (f.is_gaussian()) return GaussianDelta(f.mu(), epsilon);
  const double scale = std::exp(epsilon);
  double best = 0.0;
  const auto& a = f.alphas();
  const auto& b = f.betas();
  for (size_t i = 0; i < a.size(); ++i) {
    best = std::max(best, 1.0 - b[i] - scale * a[i]);
  }
  return Clamp01(best);
}

absl::StatusOr<TradeoffCurve> FEpsDeltaCurve(double epsilon, double delta) {
  if (!(epsilon >= 0.0) || std::isinf(epsilon)) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "epsilon should be finite and nonnegative, got %g.", epsilon));
  }
  if (!IsUnitInterval(delta)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("delta should be in [0,1], got %g.", delta));
  }
  const double scale = std::exp(epsilon);
  std::vector<double> xs = DefaultAlphaGrid();
  for (double knot : {(1.0 - delta) / (1.0 + scale), 1.0 - delta}) {
    if (knot > 0.0 && knot < 1.0) xs.push_back(knot);
  }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  std::vector<double> ys(xs.size());
  for (size_t i = 0; i < xs.size(); ++i) {
    const double a = xs[i];
    ys[i] = Clamp01(std::max({0.0, 1.0 - delta - scale * a,
                              (1.0 - delta - a) / scale}));
  }
  return TradeoffCurve::Grid(std::move(xs), std::move(ys), /*symmetric=*/true);
}

absl::StatusOr<DivergenceSummary> GdpToDivergences(double mu, double omega) {
  if (!(mu >= 0.0)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("mu should be nonnegative, got %g.", mu));
  }
  if (!(omega > 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("omega should be greater than 1, got %g.", omega));
  }
  DivergenceSummary summary;
  summary.rdp_order = omega;
  summary.rdp_eps = mu * mu * omega / 2.0;
  summary.zcdp_rho = mu * mu / 2.0;
  summary.tcdp_rho = mu * mu * omega / 2.0;
  summary.tcdp_omega = omega;
  return summary;
}

}  // namespace fdp
