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

// Sampling-induced distributions of the shift magnitude c over a training run.

#ifndef FDP_SAMPLING_H_
#define FDP_SAMPLING_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "fdp/mixture.h"

namespace fdp {

enum class Strategy { kSS, kSH };
enum class Clipping { kIC, kBC, kGEN };

struct SamplerConfig {
  int64_t N = 1;
  int64_t s = 1;
  int64_t m = 1;
  int64_t E = 1;
  int64_t g = 1;
  Strategy strategy = Strategy::kSS;
  Clipping clipping = Clipping::kGEN;
};

// Positive fields, N divisible by m*s, g <= N, s = 1 for IC and m = 1 for BC.
absl::Status ValidateSamplerConfig(const SamplerConfig& config);

int64_t RoundsPerEpoch(const SamplerConfig& config);

std::string StrategyName(Strategy strategy);
std::string ClippingName(Clipping clipping);
absl::StatusOr<Strategy> ParseStrategy(const std::string& name);
absl::StatusOr<Clipping> ParseClipping(const std::string& name);

// probs[k] = probability that exactly k subsets of a round hold a marked
// sample.
struct RoundKDist {
  std::vector<double> probs;
};

inline constexpr double kDefaultTruncation = 1e-12;

// Map from c^2 to probability. truncated_mass is what pruning removed.
struct CVecDist {
  std::map<int64_t, double> entries;
  double truncated_mass = 0.0;
};

double LogBinomial(int64_t n, int64_t k);

// Hypergeometric q_k = C(N-g, m-k) C(g, k) / C(N, m).
absl::StatusOr<double> QkIcSubsampling(int64_t N, int64_t m, int64_t g,
                                       int64_t k);
absl::StatusOr<RoundKDist> RoundDistIcSubsampling(int64_t N, int64_t m,
                                                  int64_t g);

// Same value through exact rational arithmetic. Intended as a cross-check
// for N up to about 1e4.
absl::StatusOr<double> QkIcSubsamplingExact(int64_t N, int64_t m, int64_t g,
                                            int64_t k);

// With K marked slots placed uniformly among m groups of s slots, the
// probability that exactly k groups are hit, k = 0..min(m, K).
absl::StatusOr<std::vector<double>> GroupOccupancy(int64_t m, int64_t s,
                                                   int64_t K);

struct QkEstimate {
  double value = 0.0;
  double std_error = 0.0;
  bool exact = true;
};

struct McOptions {
  int64_t trials = 100000;
  uint64_t seed = 1;
  int workers = 1;
};

inline constexpr int64_t kExactMaxSlots = 64;
inline constexpr int64_t kExactMaxGroup = 8;

// Exact when m*s <= 64 and g <= 8. Otherwise a Monte Carlo estimate if `mc`
// is given, else an OutOfRange error.
absl::StatusOr<QkEstimate> QkGeneralSubsampling(
    int64_t N, int64_t m, int64_t s, int64_t g, int64_t k,
    const std::optional<McOptions>& mc = std::nullopt);
absl::StatusOr<RoundKDist> RoundDistGeneralSubsampling(int64_t N, int64_t m,
                                                       int64_t s, int64_t g);

// 1 - C(N-g, s) / C(N, s).
absl::StatusOr<double> Q1BatchSubsampling(int64_t N, int64_t s, int64_t g);

// Balls-in-bins form over j = 1..g occupied rounds for batch clipping with
// shuffling: q_j = C(N/s, j) C(g-1, j-1) / C(N/s - 1 + g, g). probs[0] = 0.
absl::StatusOr<RoundKDist> QdistBcShuffling(int64_t N, int64_t s, int64_t g);

// Occupied-round count for g marked samples under a uniform permutation cut
// into N/s blocks of s.
absl::StatusOr<RoundKDist> QdistBcShufflingOccupancy(int64_t N, int64_t s,
                                                     int64_t g);

// Distribution of sum over rounds of k^2 for i.i.d. rounds.
absl::StatusOr<CVecDist> MultiroundCDist(const RoundKDist& round,
                                         int64_t rounds,
                                         double eps_trunc = kDefaultTruncation);

// E-fold convolution.
absl::StatusOr<CVecDist> EpochConvolve(const CVecDist& per_epoch, int64_t E,
                                       double eps_trunc = kDefaultTruncation);

// Per-epoch c^2 distribution from the closed forms. Unimplemented for
// shuffling rows without one (IC/GEN shuffling with g >= 2).
absl::StatusOr<CVecDist> PerEpochCDist(const SamplerConfig& config,
                                       double eps_trunc = kDefaultTruncation);

// PerEpochCDist convolved over config.E epochs.
absl::StatusOr<CVecDist> RunCDist(const SamplerConfig& config,
                                  double eps_trunc = kDefaultTruncation);

// c = sqrt(c^2); truncated mass is added to the largest retained c.
absl::StatusOr<MixtureSpec> CDistToMixture(const CVecDist& dist,
                                           double sigma);

struct TailPair {
  TailParams lower;
  std::optional<TailParams> upper;
  bool degenerate = false;
};

// c^L = sqrt((1 + 1/sqrt(2E))E), c^U = sqrt((1 - 1/sqrt(2E))E), both with
// mass e^{-E}. c^U is clamped to 0 and flagged when E <= 1/2.
absl::StatusOr<TailPair> HoeffdingTails(double e_eff);

// Single-epoch shuffling tails: c^L = sqrt(g), l = g^2 ms / (N - g); the
// upper tail c^U = sqrt(g), u = g^2 / (N/s - g - g^2) when m = 1, g <= s,
// N/s > g + g^2 and u < 1.
absl::StatusOr<TailPair> ShufflingTailParams(int64_t N, int64_t m, int64_t s,
                                             int64_t g);

// Joint distribution over (c_1, ..., c_g), c_k = number of rounds in which
// exactly k subsets hold a marked sample.
using JointCounts = std::map<std::vector<int64_t>, double>;

// Each round at level k moves to level k' with probability C(k, k')/2^k.
absl::StatusOr<JointCounts> FilterTransform(const JointCounts& joint);

CVecDist JointToCDist(const JointCounts& joint);

}  // namespace fdp

#endif  // FDP_SAMPLING_H_
