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

#include <cmath>
#include <limits>

#include "boost/math/distributions/normal.hpp"
#include "gtest/gtest.h"

namespace fdp {
namespace {

const boost::math::normal kStd;

TEST(NormalTest, CdfAgreesWithBoost) {
  for (double x = -30.0; x <= 8.0; x += 0.37) {
    const double want = boost::math::cdf(kStd, x);
    EXPECT_NEAR(NormalCdf(x), want, 1e-15 + 1e-13 * want) << x;
    const double tail = boost::math::cdf(boost::math::complement(kStd, x));
    EXPECT_NEAR(NormalSurvival(x), tail, 1e-15 + 1e-13 * tail) << x;
  }
}

TEST(NormalTest, QuantileRoundTrips) {
  for (double p : {1e-300, 1e-100, 1e-20, 1e-8, 0.01, 0.3, 0.5, 0.77, 0.999}) {
    const double x = NormalQuantile(p);
    EXPECT_NEAR(x, boost::math::quantile(kStd, p), 1e-12 * (1 + std::abs(x)))
        << p;
    EXPECT_NEAR(NormalUpperQuantile(p), -x, 1e-12 * (1 + std::abs(x))) << p;
  }
}

TEST(NormalTest, QuantileEndpoints) {
  EXPECT_EQ(NormalQuantile(0.0), -std::numeric_limits<double>::infinity());
  EXPECT_EQ(NormalQuantile(1.0), std::numeric_limits<double>::infinity());
  EXPECT_TRUE(std::isnan(NormalQuantile(1.5)));
}

TEST(NormalTest, PdfAtZero) {
  EXPECT_DOUBLE_EQ(NormalPdf(0.0), 1.0 / std::sqrt(2.0 * M_PI));
}

TEST(SolveBracketedTest, FindsCubeRoot) {
  const auto r = SolveBracketed([](double x) { return x * x * x - 2.0; }, 0.0,
                                2.0, RootOptions{});
  ASSERT_TRUE(r.ok());
  EXPECT_NEAR(*r, std::cbrt(2.0), 1e-13);
}

TEST(SolveBracketedTest, RejectsBadBrackets) {
  const auto f = [](double x) { return x * x + 1.0; };
  EXPECT_EQ(SolveBracketed(f, 1.0, 0.0, RootOptions{}).status().code(),
            absl::StatusCode::kInvalidArgument);
  EXPECT_EQ(SolveBracketed(f, -1.0, 1.0, RootOptions{}).status().code(),
            absl::StatusCode::kFailedPrecondition);
}

TEST(SolveBracketedTest, ReportsExhaustedBudget) {
  RootOptions opts;
  opts.max_iterations = 2;
  const auto r =
      SolveBracketed([](double x) { return std::tanh(x - 0.3); }, -5, 5, opts);
  EXPECT_EQ(r.status().code(), absl::StatusCode::kInternal);
}

}  // namespace
}  // namespace fdp
