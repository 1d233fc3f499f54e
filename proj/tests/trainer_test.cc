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

#include "fdp/trainer.h"

#include <cmath>
#include <set>

#include "fdp/dataset.h"
#include "gtest/gtest.h"

namespace fdp {
namespace {

SamplerConfig Config(Strategy st, Clipping cl, int64_t N, int64_t s,
                     int64_t m, int64_t E) {
  SamplerConfig c;
  c.strategy = st;
  c.clipping = cl;
  c.N = N;
  c.s = s;
  c.m = m;
  c.E = E;
  return c;
}

TEST(ClipTest, ScalesOnlyLongVectors) {
  EXPECT_EQ(Clip({0.3, 0.4}, 1.0), (std::vector<double>{0.3, 0.4}));
  const auto v = Clip({3.0, 4.0}, 1.0);
  EXPECT_NEAR(v[0], 0.6, 1e-15);
  EXPECT_NEAR(v[1], 0.8, 1e-15);
}

TEST(ClipTest, HugeVectorsKeepDirection) {
  const auto v = Clip({3e200, 4e200}, 1.0);
  EXPECT_NEAR(v[0], 0.6, 1e-15);
  EXPECT_NEAR(v[1], 0.8, 1e-15);
}

TEST(GradientTest, SquaredLoss) {
  Model m;
  m.weights = {2.0, 1.0};
  m.loss = LossKind::kSquared;
  // residual = 2*3 + 1 - 4 = 3
  const auto g = Gradient(m, {3.0}, 4.0);
  EXPECT_NEAR(g[0], 9.0, 1e-15);
  EXPECT_NEAR(g[1], 3.0, 1e-15);
  EXPECT_NEAR(Loss(m, {3.0}, 4.0), 4.5, 1e-15);
}

TEST(GradientTest, LogisticLossMatchesFiniteDifference) {
  Model m;
  m.weights = {0.3, -0.2, 0.1};
  m.loss = LossKind::kLogistic;
  const std::vector<double> x = {1.5, -0.7};
  const auto g = Gradient(m, x, 1.0);
  for (size_t i = 0; i < m.weights.size(); ++i) {
    Model hi = m, lo = m;
    hi.weights[i] += 1e-6;
    lo.weights[i] -= 1e-6;
    EXPECT_NEAR(g[i], (Loss(hi, x, 1.0) - Loss(lo, x, 1.0)) / 2e-6, 1e-7);
  }
}

TEST(SampleEpochTest, ShufflingPartitions) {
  const SamplerConfig c = Config(Strategy::kSH, Clipping::kGEN, 24, 3, 2, 1);
  Philox rng(9, 0);
  const auto rounds = SampleEpoch(c, rng);
  ASSERT_EQ(rounds.size(), 4u);
  std::set<int64_t> seen;
  for (const Round& r : rounds) {
    ASSERT_EQ(r.size(), 2u);
    for (const auto& subset : r) {
      ASSERT_EQ(subset.size(), 3u);
      seen.insert(subset.begin(), subset.end());
    }
  }
  EXPECT_EQ(seen.size(), 24u);
}

TEST(SampleEpochTest, SubsamplingRoundsAreDistinctWithin) {
  const SamplerConfig c = Config(Strategy::kSS, Clipping::kIC, 20, 1, 5, 1);
  Philox rng(10, 0);
  for (const Round& r : SampleEpoch(c, rng)) {
    std::set<int64_t> ids;
    for (const auto& subset : r) ids.insert(subset[0]);
    EXPECT_EQ(ids.size(), 5u);
  }
}

TEST(ComputeRoundTest, NoiseScale) {
  TrainConfig cfg;
  cfg.sampler = Config(Strategy::kSH, Clipping::kBC, 4, 4, 1, 1);
  cfg.sigma = 1.0;
  cfg.clip_C = 0.5;
  const Dataset d = MakeLinearData(4, 1.0, 0.0);
  const Model m = InitialModel(cfg, 1);
  double sq_two = 0.0, sq_one = 0.0;
  constexpr int kReps = 20000;
  for (int i = 0; i < kReps; ++i) {
    Philox a(i, 1), b(i, 1);
    const RoundUpdate u = ComputeRound(cfg, m, d, {{0, 1, 2, 3}}, a);
    TrainConfig one = cfg;
    one.noise_scale = NoiseScale::kOneC;
    const RoundUpdate v = ComputeRound(one, m, d, {{0, 1, 2, 3}}, b);
    sq_two += std::pow(u.U_noised[0] - u.U[0], 2);
    sq_one += std::pow(v.U_noised[0] - v.U[0], 2);
  }
  EXPECT_NEAR(std::sqrt(sq_two / kReps), 1.0, 0.02);
  EXPECT_NEAR(std::sqrt(sq_one / kReps), 0.5, 0.01);
}

TEST(TrainTest, ValidatesConfig) {
  TrainConfig cfg;
  cfg.sampler = Config(Strategy::kSH, Clipping::kBC, 10, 5, 1, 1);
  cfg.inner = InnerMode::kIcGrad;
  EXPECT_FALSE(ValidateTrainConfig(cfg).ok());
  cfg.inner = InnerMode::kBcMean;
  EXPECT_TRUE(ValidateTrainConfig(cfg).ok());
  EXPECT_FALSE(Train(cfg, MakeLinearData(9, 1.0, 0.0)).ok());
}

TEST(TrainTest, DivergenceIsReported) {
  TrainConfig cfg;
  cfg.sampler = Config(Strategy::kSH, Clipping::kBC, 10, 10, 1, 200);
  cfg.clip_C = 1e300;
  cfg.eta0 = 1e3;
  cfg.lr_decay = 1.0;
  const auto r = Train(cfg, MakeLinearData(10, 50.0, 0.0));
  EXPECT_EQ(r.status().code(), absl::StatusCode::kInternal);
}

TEST(TrainTest, SeedChangesNoise) {
  TrainConfig cfg;
  cfg.sampler = Config(Strategy::kSH, Clipping::kBC, 40, 4, 1, 2);
  cfg.sigma = 1.0;
  const Dataset d = MakeLinearData(40, 1.0, 0.0);
  cfg.seed = 1;
  const auto a = Train(cfg, d).value();
  cfg.seed = 2;
  const auto b = Train(cfg, d).value();
  EXPECT_NE(a.model.weights, b.model.weights);
}

TEST(PairedUpdateTest, IdenticalDataGivesZeroDifference) {
  TrainConfig cfg;
  cfg.sampler = Config(Strategy::kSS, Clipping::kGEN, 12, 2, 3, 1);
  const Dataset d = MakeBlobs(12, 0.5, 3);
  const auto p =
      PairedRoundUpdate(cfg, InitialModel(cfg, 2), d, d, 77, 0).value();
  EXPECT_EQ(p.k, 0);
  EXPECT_EQ(p.U, p.U_prime);
}

}  // namespace
}  // namespace fdp
