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

// Standard normal distribution helpers and a bracketed scalar root solver.
// Everything here is a pure function of its arguments.

#ifndef FDP_NORMAL_H_
#define FDP_NORMAL_H_

#include <functional>

#include "absl/status/statusor.h"

namespace fdp {

// Phi(x), the standard normal CDF, computed from erfc so that the lower tail
// keeps full relative precision.
double NormalCdf(double x);

// 1 - Phi(x) without cancellation.
double NormalSurvival(double x);

// Standard normal density.
double NormalPdf(double x);

// Phi^{-1}(p) for p in [0,1]. Returns -inf / +inf at the endpoints.
// Solved by bracketed root finding on NormalCdf, absolute error below 1e-12.
double NormalQuantile(double p);

// Phi^{-1}(1 - q), i.e. the upper-tail quantile, computed without forming
// 1 - q. Use this for trade-off evaluation near alpha = 0.
double NormalUpperQuantile(double q);

struct RootOptions {
  double x_tolerance = 1e-14;
  double f_tolerance = 0.0;
  int max_iterations = 200;
};

// Finds x in [lo, hi] with f(x) = 0 for a function whose values at lo and hi
// have opposite signs (or one is zero). Bisection safeguarded secant
// (Illinois variant). Returns FailedPrecondition when the bracket does not
// straddle a root and Internal when the iteration budget runs out.
absl::StatusOr<double> SolveBracketed(const std::function<double(double)>& f,
                                      double lo, double hi,
                                      const RootOptions& options = {});

}  // namespace fdp

#endif  // FDP_NORMAL_H_
