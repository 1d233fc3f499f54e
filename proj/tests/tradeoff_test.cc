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

#include <cmath>
#include <vector>

#include "boost/math/distributions/normal.hpp"
#include "gtest/gtest.h"

namespace fdp {
namespace {

const boost::math::normal kStd;

double RefG(double mu, double a) {
  return boost::math::cdf(
      kStd, boost::math::quantile(boost::math::complement(kStd, a)) - mu);
}

TEST(TradeoffTest, GaussianMatchesReference) {
  for (double mu : {0.1, 1.0, 3.0}) {
    for (double a : {1e-9, 0.01, 0.2, 0.5, 0.9}) {
      EXPECT_NEAR(GaussianTradeoff(mu, a), RefG(mu, a), 1e-14) << mu << " " << a;
    }
  }
  EXPECT_EQ(GaussianTradeoff(2.0, 0.0), 1.0);
  EXPECT_EQ(GaussianTradeoff(2.0, 1.0), 0.0);
}

TEST(TradeoffTest, GaussianEvalValidates) {
  EXPECT_FALSE(GaussianEval(-1.0, 0.5).ok());
  EXPECT_FALSE(GaussianEval(1.0, 1.5).ok());
  EXPECT_FALSE(TradeoffCurve::Gaussian(std::nan("")).ok());
}

TEST(TradeoffTest, GridRejectsMalformedInput) {
  EXPECT_FALSE(TradeoffCurve::Grid({0.0, 0.5}, {1.0, 0.5}).ok());
  EXPECT_FALSE(TradeoffCurve::Grid({0.0, 0.5, 0.5, 1.0}, {1, .5, .5, 0}).ok());
  EXPECT_FALSE(TradeoffCurve::Grid({0.0, 1.0}, {1.0}).ok());
  EXPECT_FALSE(TradeoffCurve::Grid({0.0, 1.0}, {1.5, 0.0}).ok());
  EXPECT_TRUE(TradeoffCurve::Grid({0.0, 1.0}, {1.0, 0.0}).ok());
}

TEST(TradeoffTest, ValidateFlagsNonConvexCurves) {
  const auto bent = TradeoffCurve::Grid({0.0, 0.5, 1.0}, {1.0, 0.6, 0.0});
  ASSERT_TRUE(bent.ok());
  EXPECT_FALSE(ValidateTradeoff(*bent).ok());
  EXPECT_TRUE(ValidateTradeoff(TradeoffCurve::Gaussian(1.0).value()).ok());
}

TEST(TradeoffTest, ConvexifyTakesLowerHull) {
  const auto bent = TradeoffCurve::Grid({0.0, 0.5, 1.0}, {1.0, 0.6, 0.0});
  const TradeoffCurve hull = Convexify(*bent);
  EXPECT_NEAR(hull.Eval(0.5), 0.5, 1e-15);
  EXPECT_TRUE(ValidateTradeoff(hull).ok());
}

TEST(TradeoffTest, InverseOfSymmetricCurveIsItself) {
  const TradeoffCurve f =
      TradeoffCurve::Sampled(TradeoffCurve::Gaussian(1.3).value(),
                             UniformAlphaGrid(2001));
  const TradeoffCurve inv = CurveInverse(f);
  for (double a : {0.05, 0.3, 0.6}) {
    EXPECT_NEAR(inv.Eval(a), f.Eval(a), 2e-4);
  }
}

TEST(TradeoffTest, SubsampleOperatorKnownValue) {
  // C_p(G_1) at alpha = 0.2 with p = 0.5.
  const auto c = SubsampleOperator(TradeoffCurve::Gaussian(1.0).value(), 0.5);
  ASSERT_TRUE(c.ok());
  EXPECT_NEAR(c->Eval(0.2), 0.6185, 5e-4);
  EXPECT_TRUE(ValidateTradeoff(*c, 1e-7).ok());
}

TEST(TradeoffTest, SubsampleOperatorEndpoints) {
  const TradeoffCurve g = TradeoffCurve::Gaussian(2.0).value();
  const auto one = SubsampleOperator(g, 1.0);
  ASSERT_TRUE(one.ok());
  EXPECT_NEAR(one->Eval(0.3), RefG(2.0, 0.3), 1e-6);
  const auto zero = SubsampleOperator(g, 0.0);
  ASSERT_TRUE(zero.ok());
  EXPECT_NEAR(zero->Eval(0.3), 0.7, 1e-9);
  EXPECT_FALSE(SubsampleOperator(g, 1.5).ok());
}

TEST(TradeoffTest, ComposeGaussians) {
  EXPECT_NEAR(ComposeGaussians(std::vector<double>{1, 2, 2}).value(), 3.0, 1e-15);
  EXPECT_FALSE(ComposeGaussians(std::vector<double>{1, -2}).ok());
}

TEST(TradeoffTest, GroupIterateOnGridMatchesGaussianAtNodes) {
  const TradeoffCurve f = TradeoffCurve::Sampled(
      TradeoffCurve::Gaussian(0.5).value(), DefaultAlphaGrid());
  const auto h = GroupIterate(f, 3);
  ASSERT_TRUE(h.ok());
  for (double a : {0.01, 0.1, 0.4, 0.8}) {
    EXPECT_NEAR(h->Eval(a), RefG(1.5, a), 5e-5) << a;
  }
  EXPECT_FALSE(GroupIterate(f, 0).ok());
}

TEST(TradeoffTest, GroupIterateOnGaussianIsClosedForm) {
  const auto h = GroupIterate(TradeoffCurve::Gaussian(0.7).value(), 4);
  ASSERT_TRUE(h.ok());
  ASSERT_TRUE(h->is_gaussian());
  EXPECT_NEAR(h->mu(), 2.8, 1e-15);
}

TEST(TradeoffTest, DeltaOfEpsilon) {
  EXPECT_NEAR(GaussianDelta(1.0, 0.0), 0.382925, 1e-6);
  EXPECT_EQ(GaussianDelta(0.0, 1.0), 0.0);
  EXPECT_FALSE(DeltaOfEpsilon(TradeoffCurve(), -1.0).ok());
}

TEST(TradeoffTest, EpsDeltaCurve) {
  const auto f = FEpsDeltaCurve(std::log(2.0), 0.1);
  ASSERT_TRUE(f.ok());
  EXPECT_NEAR(f->Eval(0.2), 0.5, 1e-12);
  EXPECT_NEAR(f->Eval(0.95), 0.0, 1e-12);
  EXPECT_NEAR(DeltaOfEpsilon(*f, std::log(2.0)).value(), 0.1, 1e-12);
}

TEST(TradeoffTest, Divergences) {
  const auto d = GdpToDivergences(2.0, 3.0);
  ASSERT_TRUE(d.ok());
  EXPECT_DOUBLE_EQ(d->zcdp_rho, 2.0);
  EXPECT_DOUBLE_EQ(d->rdp_eps, 3.0 * 4.0 / 2.0);
  EXPECT_FALSE(GdpToDivergences(1.0, 1.0).ok());
}

TEST(TradeoffTest, PointwiseMinStaysBelowBoth) {
  const TradeoffCurve a = TradeoffCurve::Gaussian(1.0).value();
  const TradeoffCurve b = FEpsDeltaCurve(1.0, 0.01).value();
  const TradeoffCurve m = PointwiseMin(a, b, UniformAlphaGrid(101));
  for (double x : UniformAlphaGrid(101)) {
    EXPECT_LE(m.Eval(x), std::min(a.Eval(x), b.Eval(x)) + 1e-15);
  }
}

}  // namespace
}  // namespace fdp
