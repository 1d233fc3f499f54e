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

#include "fdp/oracle.h"

#include <cmath>

#include "fdp/mixture.h"
#include "gtest/gtest.h"

namespace fdp {
namespace {

TEST(OracleTest, TotalVariation) {
  EXPECT_DOUBLE_EQ(TotalVariation({{1, 0.5}, {2, 0.5}}, {{1, 0.5}, {2, 0.5}}),
                   0.0);
  EXPECT_DOUBLE_EQ(TotalVariation({{1, 1.0}}, {{2, 1.0}}), 1.0);
  EXPECT_DOUBLE_EQ(TotalVariation({{1, 0.4}, {2, 0.6}}, {{1, 0.2}, {2, 0.8}}),
                   0.2);
}

TEST(OracleTest, EmpiricalQDistIsWorkerInvariant) {
  SamplerConfig c;
  c.strategy = Strategy::kSS;
  c.clipping = Clipping::kBC;
  c.N = 20;
  c.s = 4;
  c.g = 2;
  const EmpiricalDist a = EmpiricalQDist(c, 20000, 5, 1).value();
  const EmpiricalDist b = EmpiricalQDist(c, 20000, 5, 4).value();
  EXPECT_EQ(a.freq, b.freq);
  EXPECT_EQ(a.trials, 20000);
}

TEST(OracleTest, EmpiricalRoundKMatchesHypergeometric) {
  const EmpiricalDist e = EmpiricalRoundK(10, 3, 1, 2, 100000, 8, 2).value();
  EXPECT_LE(TotalVariation(e.freq, ToMap(RoundDistIcSubsampling(10, 3, 2).value())),
            0.01);
  for (const auto& [k, se] : e.std_error) EXPECT_GT(se, 0.0);
}

TEST(OracleTest, EmpiricalTradeoffTracksGaussian) {
  const std::vector<double> alphas = {0.05, 0.2, 0.5};
  const EmpiricalTradeoff t =
      EmpiricalTradeoffCurve(1.0, 2.0, 200000, alphas, 3, 2).value();
  for (size_t i = 0; i < alphas.size(); ++i) {
    EXPECT_NEAR(t.betas[i], GaussianTradeoff(1.0, alphas[i]),
                kStdErrorMultiplier * t.std_errors[i] + 1e-3);
  }
}

TEST(OracleTest, InfimumMatchesMixture) {
  const std::vector<std::pair<TradeoffCurve, double>> comps = {
      {TradeoffCurve::Gaussian(1.0).value(), 0.5},
      {TradeoffCurve::Gaussian(2.0).value(), 0.5}};
  const MixtureSpec spec = MakeMixture({{1.0, 0.5}, {2.0, 0.5}}, 1.0).value();
  for (double a : {0.1, 0.4}) {
    EXPECT_NEAR(InfimumOracle(comps, a, 1e-3).value(),
                MixtureTradeoff(spec, a).value(), 1e-3);
  }
  EXPECT_FALSE(InfimumOracle(comps, 0.5, 0.0).ok());
}

TEST(OracleTest, MatrixReportsBallsInBinsMismatch) {
  VerifyOptions opts;
  opts.trials = 20000;
  opts.workers = 2;
  const std::vector<OracleCheck> checks = RunOracleMatrix(opts);
  ASSERT_FALSE(checks.empty());
  for (const OracleCheck& c : checks) {
    if (c.name.find("balls-in-bins") != std::string::npos) {
      EXPECT_FALSE(c.passed) << c.detail;
    } else if (c.name.find("occupancy") != std::string::npos) {
      EXPECT_TRUE(c.passed) << c.detail;
    }
  }
}

}  // namespace
}  // namespace fdp
