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

#include "fdp/mixture.h"

#include <cmath>
#include <optional>

#include "boost/math/distributions/normal.hpp"
#include "gtest/gtest.h"

namespace fdp {
namespace {

const boost::math::normal kStd;

double RefG(double mu, double a) {
  return boost::math::cdf(
      kStd, boost::math::quantile(boost::math::complement(kStd, a)) - mu);
}

MixtureSpec Spec(std::vector<MixtureComponent> comps, double sigma = 1.0) {
  return MakeMixture(std::move(comps), sigma).value();
}

TEST(MixtureTest, MakeMixtureSortsAndMerges) {
  const MixtureSpec s = Spec({{2.0, 0.25}, {1.0, 0.5}, {2.0, 0.25}});
  ASSERT_EQ(s.components.size(), 2u);
  EXPECT_EQ(s.components[0].c, 1.0);
  EXPECT_EQ(s.components[1].q, 0.5);
}

TEST(MixtureTest, ValidateRejectsBadMass) {
  EXPECT_FALSE(MakeMixture({{1.0, 0.5}, {2.0, 0.4}}, 1.0).ok());
  EXPECT_FALSE(MakeMixture({{-1.0, 1.0}}, 1.0).ok());
  EXPECT_FALSE(MakeMixture({{1.0, 1.0}}, 0.0).ok());
}

TEST(MixtureTest, SingleComponentIsGaussian) {
  const MixtureSpec s = Spec({{3.0, 1.0}}, 2.0);
  for (double a : {1e-6, 0.1, 0.5, 0.95}) {
    EXPECT_NEAR(MixtureTradeoff(s, a).value(), RefG(1.5, a), 1e-12);
  }
}

TEST(MixtureTest, LambdaSolvesItsEquation) {
  const MixtureSpec s = Spec({{1.0, 0.3}, {2.0, 0.7}});
  for (double a : {0.01, 0.2, 0.7}) {
    const double lam = SolveLambda(s, a).value();
    double rhs = 0.0;
    for (const auto& c : s.components) {
      rhs += c.q * boost::math::cdf(kStd, lam / c.c + c.c / 2.0);
    }
    EXPECT_NEAR(1.0 - a, rhs, 1e-12);
  }
  EXPECT_TRUE(std::isinf(SolveLambda(s, 0.0).value()));
}

TEST(MixtureTest, IdentityComponentGivesFlatLambda) {
  const MixtureSpec s = Spec({{0.0, 0.5}, {2.0, 0.5}});
  // a_at_zero = 0.5 * PhiBar(1) = 0.0793...; Lambda = 0 up to a_at_zero + q0.
  EXPECT_EQ(SolveLambda(s, 0.3).value(), 0.0);
  const double f = MixtureTradeoff(s, 0.3).value();
  EXPECT_NEAR(f + 0.3, 1.0 - 0.5 * (boost::math::cdf(kStd, 1.0) -
                                    boost::math::cdf(kStd, -1.0)),
              1e-12);
}

TEST(MixtureTest, CurveIsValidTradeoff) {
  const auto curve = MixtureCurve(Spec({{0.5, 0.2}, {1.0, 0.3}, {4.0, 0.5}}));
  ASSERT_TRUE(curve.ok());
  EXPECT_TRUE(ValidateTradeoff(*curve, 1e-9).ok());
}

TEST(MixtureTest, LowerBoundBetaKnownPoints) {
  const TailParams none{TailSide::kLower, 1.0, 0.0};
  EXPECT_NEAR(LowerBoundBeta(none, 1.0).value(), boost::math::cdf(kStd, -0.5),
              1e-14);
  const TailParams some{TailSide::kLower, 2.0, 0.05};
  const double b = LowerBoundBeta(some, 1.0).value();
  EXPECT_NEAR(RefG(2.0, b) - 0.05, b, 1e-12);
}

TEST(MixtureTest, UpperKnotsKnownValue) {
  const auto k = UpperBoundKnots({TailSide::kUpper, 1.0, 0.01}, 1.0);
  ASSERT_TRUE(k.ok());
  EXPECT_NEAR(k->beta0, 0.3050, 5e-5);
  EXPECT_NEAR(k->beta1, 0.01 + 0.99 * RefG(1.0, k->beta0), 1e-14);
  EXPECT_FALSE(UpperBoundKnots({TailSide::kUpper, 1.0, 1.0}, 1.0).ok());
}

TEST(MixtureTest, UpperKnotsAtZeroShift) {
  const auto k = UpperBoundKnots({TailSide::kUpper, 0.0, 0.0}, 1.0);
  ASSERT_TRUE(k.ok());
  EXPECT_EQ(k->beta0, 0.5);
  EXPECT_EQ(k->beta1, 0.5);
}

TEST(MixtureTest, BoundsOrderAroundHats) {
  const TailParams lo{TailSide::kLower, 1.5, 0.02};
  const TailParams up{TailSide::kUpper, 1.5, 0.02};
  for (double a = 0.0; a <= 1.0; a += 0.01) {
    EXPECT_LE(LowerHatEval(lo, 1.0, a), LowerBoundEval(lo, 1.0, a).value() + 1e-15);
    EXPECT_LE(UpperBoundEval(up, 1.0, a).value(), UpperHatEval(up, 1.0, a) + 1e-12);
  }
}

TEST(MixtureTest, SandwichFlagsWrongTail) {
  const MixtureSpec s = Spec({{1.0, 0.5}, {3.0, 0.5}});
  // Claims no mass above c = 1, which is false.
  const auto r = SandwichCheck(s, {TailSide::kLower, 1.0, 0.0}, std::nullopt);
  ASSERT_TRUE(r.ok());
  EXPECT_GT(r->max_violation, 0.01);
  const auto ok = SandwichCheck(s, {TailSide::kLower, 3.0, 0.0},
                                TailParams{TailSide::kUpper, 1.0, 0.0});
  ASSERT_TRUE(ok.ok());
  EXPECT_LE(ok->max_violation, 1e-12);
}

}  // namespace
}  // namespace fdp
