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

#include "fdp/normal.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "absl/status/status.h"
#include "absl/strings/str_format.h"

namespace fdp {
namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;

// Phi(-38.5) underflows to a subnormal; beyond that the lower-tail bracket is
// meaningless.
constexpr double kQuantileBracket = 38.5;

// Rational approximation with relative error near 1e-9, used only to seat a
// narrow bracket for the root solve below.
double SeedQuantile(double p) {
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  if (p < 0.02425) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q +
            c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double q = p - 0.5;
  const double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) *
         q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

// Solves Phi(x) = p for p in (0, 0.5].
double LowerTailQuantile(double p) {
  auto residual = [p](double x) { return NormalCdf(x) - p; };
  RootOptions options;
  options.x_tolerance = 1e-15;
  const double seed = SeedQuantile(p);
  const double width = 1e-7 * (1.0 + std::abs(seed));
  absl::StatusOr<double> root =
      SolveBracketed(residual, seed - width, std::min(0.0, seed + width),
                     options);
  if (root.ok()) return *root;
  root = SolveBracketed(residual, -kQuantileBracket, 0.0, options);
  // The wide bracket always straddles the root for p in (0, 0.5].
  return root.ok() ? *root : -kQuantileBracket;
}

}  // namespace

double NormalCdf(double x) { return 0.5 * std::erfc(-x * kInvSqrt2); }

double NormalSurvival(double x) { return 0.5 * std::erfc(x * kInvSqrt2); }

double NormalPdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double NormalQuantile(double p) {
  if (std::isnan(p) || p < 0.0 || p > 1.0) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  if (p == 0.0) return -std::numeric_limits<double>::infinity();
  if (p == 1.0) return std::numeric_limits<double>::infinity();
  if (p == 0.5) return 0.0;
  if (p < 0.5) return LowerTailQuantile(p);
  return -LowerTailQuantile(1.0 - p);
}

double NormalUpperQuantile(double q) {
  if (std::isnan(q) || q < 0.0 || q > 1.0) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  if (q == 0.0) return std::numeric_limits<double>::infinity();
  if (q == 1.0) return -std::numeric_limits<double>::infinity();
  if (q == 0.5) return 0.0;
  if (q < 0.5) return -LowerTailQuantile(q);
  return LowerTailQuantile(1.0 - q);
}

absl::StatusOr<double> SolveBracketed(const std::function<double(double)>& f,
                                      double lo, double hi,
                                      const RootOptions& options) {
  if (!(lo <= hi)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("invalid bracket [%g, %g]", lo, hi));
  }
  double a = lo;
  double b = hi;
  double fa = f(a);
  double fb = f(b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if (std::signbit(fa) == std::signbit(fb)) {
    return absl::FailedPreconditionError(absl::StrFormat(
        "bracket [%g, %g] does not straddle a root (f = %g, %g)", lo, hi, fa,
        fb));
  }
  // Illinois regula falsi; a bisection step is forced whenever the bracket
  // fails to halve.
  int retained_side = 0;
  double previous_width = b - a;
  bool force_bisection = false;
  for (int iteration = 0; iteration < options.max_iterations; ++iteration) {
    double c;
    if (force_bisection) {
      c = 0.5 * (a + b);
    } else {
      c = b - fb * (b - a) / (fb - fa);
      if (!(c > a && c < b)) c = 0.5 * (a + b);
    }
    const double fc = f(c);
    if (fc == 0.0 || std::abs(fc) <= options.f_tolerance) return c;
    if (std::signbit(fc) == std::signbit(fa)) {
      a = c;
      fa = fc;
      if (retained_side == 1) fb *= 0.5;
      retained_side = 1;
    } else {
      b = c;
      fb = fc;
      if (retained_side == -1) fa *= 0.5;
      retained_side = -1;
    }
    const double width = b - a;
    const double scale = std::max(1.0, std::max(std::abs(a), std::abs(b)));
    if (width <= options.x_tolerance * scale) {
      return std::abs(fa) < std::abs(fb) ? a : b;
    }
    force_bisection = width > 0.5 * previous_width;
    previous_width = width;
  }
  return absl::InternalError(absl::StrFormat(
      "root solver did not converge within %d iterations on [%g, %g]",
      options.max_iterations, lo, hi));
}

}  // namespace fdp
