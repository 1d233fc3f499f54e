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

#include "fdp/sampling.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "absl/strings/str_format.h"
#include "boost/multiprecision/cpp_int.hpp"
#include "fdp/rng.h"
#include "fdp/status_macros.h"

namespace fdp {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Dense distribution over consecutive integers offset, offset + 1, ...
struct Dense {
  int64_t offset = 0;
  std::vector<double> p;
};

Dense Convolve(const Dense& a, const Dense& b) {
  Dense out;
  out.offset = a.offset + b.offset;
  out.p.assign(a.p.size() + b.p.size() - 1, 0.0);
  for (size_t i = 0; i < a.p.size(); ++i) {
    if (a.p[i] == 0.0) continue;
    for (size_t j = 0; j < b.p.size(); ++j) out.p[i + j] += a.p[i] * b.p[j];
  }
  return out;
}

// Removes up to `budget` of mass from the two ends, small entries first.
void Prune(Dense& d, double budget) {
  size_t lo = 0;
  size_t hi = d.p.size();
  double removed = 0.0;
  while (hi - lo > 1) {
    const double left = d.p[lo];
    const double right = d.p[hi - 1];
    const double smaller = std::min(left, right);
    if (removed + smaller > budget) break;
    removed += smaller;
    if (left <= right) {
      ++lo;
    } else {
      --hi;
    }
  }
  if (lo == 0 && hi == d.p.size()) return;
  d.p = std::vector<double>(d.p.begin() + lo, d.p.begin() + hi);
  d.offset += static_cast<int64_t>(lo);
}

// Mass dropped from the level-k square reaches the final power at most
// (exponent >> k) times, so that prune gets a proportionally smaller budget
// and the total loss stays within eps_trunc.
Dense Power(const Dense& base, int64_t exponent, double eps_trunc) {
  int steps = 0;
  for (int64_t e = exponent; e > 0; e >>= 1) steps += 2;
  const double budget = eps_trunc / std::max(steps, 1);
  Dense result{0, {1.0}};
  Dense square = base;
  Prune(square, budget / static_cast<double>(exponent));
  for (int64_t e = exponent; e > 0; e >>= 1) {
    if (e & 1) {
      result = Convolve(result, square);
      Prune(result, budget);
    }
    if (e > 1) {
      square = Convolve(square, square);
      Prune(square, budget / static_cast<double>(e >> 1));
    }
  }
  return result;
}

double KahanSum(const std::vector<double>& values) {
  double sum = 0.0;
  double carry = 0.0;
  for (double v : values) {
    const double y = v - carry;
    const double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
  return sum;
}

CVecDist ToCVecDist(const Dense& d, double mass_in) {
  CVecDist out;
  for (size_t i = 0; i < d.p.size(); ++i) {
    if (d.p[i] > 0.0) out.entries[d.offset + static_cast<int64_t>(i)] = d.p[i];
  }
  out.truncated_mass = std::max(0.0, mass_in - KahanSum(d.p));
  return out;
}

absl::Status CheckProbabilities(const std::vector<double>& probs,
                                double tolerance) {
  double total = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0 && p <= 1.0)) {
      return absl::InvalidArgumentError(
          absl::StrFormat("probability %g is outside [0,1].", p));
    }
    total += p;
  }
  if (std::abs(total - 1.0) > tolerance) {
    return absl::InvalidArgumentError(
        absl::StrFormat("probabilities should sum to 1, got %.17g.", total));
  }
  return absl::OkStatus();
}

absl::Status CheckHypergeometric(int64_t N, int64_t m, int64_t g) {
  if (N < 1) return absl::InvalidArgumentError("N should be positive.");
  if (m < 1 || m > N) {
    return absl::InvalidArgumentError("m should be in [1, N].");
  }
  if (g < 1 || g > N) {
    return absl::InvalidArgumentError("g should be in [1, N].");
  }
  return absl::OkStatus();
}

double LogSumExp(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

boost::multiprecision::cpp_int ExactBinomial(int64_t n, int64_t k) {
  boost::multiprecision::cpp_int r = 1;
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  for (int64_t i = 1; i <= k; ++i) {
    r *= n - k + i;
    r /= i;
  }
  return r;
}

}  // namespace

absl::Status ValidateSamplerConfig(const SamplerConfig& c) {
  if (c.N < 1 || c.s < 1 || c.m < 1 || c.E < 1 || c.g < 1) {
    return absl::InvalidArgumentError(
        "N, s, m, E and g should all be positive.");
  }
  if (c.N % (c.m * c.s) != 0) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "N = %d should be divisible by m*s = %d.", c.N, c.m * c.s));
  }
  if (c.g > c.N) {
    return absl::InvalidArgumentError("g should not exceed N.");
  }
  if (c.clipping == Clipping::kIC && c.s != 1) {
    return absl::InvalidArgumentError("individual clipping requires s = 1.");
  }
  if (c.clipping == Clipping::kBC && c.m != 1) {
    return absl::InvalidArgumentError("batch clipping requires m = 1.");
  }
  return absl::OkStatus();
}

int64_t RoundsPerEpoch(const SamplerConfig& config) {
  return config.N / (config.m * config.s);
}

std::string StrategyName(Strategy strategy) {
  return strategy == Strategy::kSS ? "ss" : "sh";
}

std::string ClippingName(Clipping clipping) {
  switch (clipping) {
    case Clipping::kIC:
      return "ic";
    case Clipping::kBC:
      return "bc";
    case Clipping::kGEN:
      return "gen";
  }
  return "gen";
}

absl::StatusOr<Strategy> ParseStrategy(const std::string& name) {
  if (name == "ss") return Strategy::kSS;
  if (name == "sh") return Strategy::kSH;
  return absl::InvalidArgumentError(
      absl::StrFormat("unknown strategy '%s' (expected ss or sh).", name));
}

absl::StatusOr<Clipping> ParseClipping(const std::string& name) {
  if (name == "ic") return Clipping::kIC;
  if (name == "bc") return Clipping::kBC;
  if (name == "gen") return Clipping::kGEN;
  return absl::InvalidArgumentError(absl::StrFormat(
      "unknown clipping '%s' (expected ic, bc or gen).", name));
}

double LogBinomial(int64_t n, int64_t k) {
  if (k < 0 || k > n || n < 0) return kNegInf;
  if (k == 0 || k == n) return 0.0;
  return std::lgamma(static_cast<double>(n) + 1.0) -
         std::lgamma(static_cast<double>(k) + 1.0) -
         std::lgamma(static_cast<double>(n - k) + 1.0);
}

absl::StatusOr<RoundKDist> RoundDistIcSubsampling(int64_t N, int64_t m,
                                                  int64_t g) {
  RETURN_IF_ERROR(CheckHypergeometric(N, m, g));
  const int64_t k_max = std::min(m, g);
  const int64_t k_min = std::max<int64_t>(0, m + g - N);
  // Log weights from the ratio q_{k+1}/q_k; normalization fixes the scale.
  std::vector<double> logw(k_max + 1, kNegInf);
  logw[k_min] = 0.0;
  double peak = 0.0;
  for (int64_t k = k_min; k < k_max; ++k) {
    const double ratio = static_cast<double>(m - k) * (g - k) /
                         (static_cast<double>(k + 1) * (N - g - m + k + 1));
    logw[k + 1] = logw[k] + std::log(ratio);
    peak = std::max(peak, logw[k + 1]);
  }
  RoundKDist dist;
  dist.probs.assign(k_max + 1, 0.0);
  double total = 0.0;
  for (int64_t k = k_min; k <= k_max; ++k) {
    dist.probs[k] = std::exp(logw[k] - peak);
    total += dist.probs[k];
  }
  for (double& p : dist.probs) p /= total;
  return dist;
}

absl::StatusOr<double> QkIcSubsampling(int64_t N, int64_t m, int64_t g,
                                       int64_t k) {
  if (k < 0) return absl::InvalidArgumentError("k should be nonnegative.");
  ASSIGN_OR_RETURN(RoundKDist dist, RoundDistIcSubsampling(N, m, g));
  if (k >= static_cast<int64_t>(dist.probs.size())) return 0.0;
  return dist.probs[k];
}

absl::StatusOr<double> QkIcSubsamplingExact(int64_t N, int64_t m, int64_t g,
                                            int64_t k) {
  RETURN_IF_ERROR(CheckHypergeometric(N, m, g));
  if (k < 0) return absl::InvalidArgumentError("k should be nonnegative.");
  using boost::multiprecision::cpp_rational;
  const cpp_rational q(
      ExactBinomial(N - g, m - k) * ExactBinomial(g, k),
      ExactBinomial(N, m));
  return q.convert_to<double>();
}

absl::StatusOr<std::vector<double>> GroupOccupancy(int64_t m, int64_t s,
                                                   int64_t K) {
  if (m < 1 || s < 1) {
    return absl::InvalidArgumentError("m and s should be positive.");
  }
  if (K < 0 || K > m * s) {
    return absl::InvalidArgumentError("K should be in [0, m*s].");
  }
  const int64_t k_max = std::min(m, K);
  // logw[j][t]: log of the number of ways to put t marked slots into j
  // groups of s so that every group is hit.
  std::vector<std::vector<double>> logw(
      k_max + 1, std::vector<double>(K + 1, kNegInf));
  logw[0][0] = 0.0;
  for (int64_t j = 1; j <= k_max; ++j) {
    for (int64_t t = j; t <= std::min(K, j * s); ++t) {
      double acc = kNegInf;
      for (int64_t a = 1; a <= std::min(s, t); ++a) {
        if (logw[j - 1][t - a] == kNegInf) continue;
        acc = LogSumExp(acc, LogBinomial(s, a) + logw[j - 1][t - a]);
      }
      logw[j][t] = acc;
    }
  }
  std::vector<double> probs(k_max + 1, 0.0);
  const double log_total = LogBinomial(m * s, K);
  for (int64_t k = 0; k <= k_max; ++k) {
    if (logw[k][K] == kNegInf) continue;
    probs[k] = std::exp(LogBinomial(m, k) + logw[k][K] - log_total);
  }
  return probs;
}

absl::StatusOr<RoundKDist> RoundDistGeneralSubsampling(int64_t N, int64_t m,
                                                       int64_t s, int64_t g) {
  if (s < 1) return absl::InvalidArgumentError("s should be positive.");
  RETURN_IF_ERROR(CheckHypergeometric(N, m * s, g));
  if (m * s > kExactMaxSlots || g > kExactMaxGroup) {
    return absl::OutOfRangeError(absl::StrFormat(
        "exact enumeration needs m*s <= %d and g <= %d.", kExactMaxSlots,
        kExactMaxGroup));
  }
  ASSIGN_OR_RETURN(RoundKDist marked, RoundDistIcSubsampling(N, m * s, g));
  RoundKDist dist;
  dist.probs.assign(std::min(m, g) + 1, 0.0);
  for (int64_t K = 0; K < static_cast<int64_t>(marked.probs.size()); ++K) {
    if (marked.probs[K] == 0.0) continue;
    ASSIGN_OR_RETURN(std::vector<double> occ, GroupOccupancy(m, s, K));
    for (size_t k = 0; k < occ.size(); ++k) {
      dist.probs[k] += marked.probs[K] * occ[k];
    }
  }
  return dist;
}

absl::StatusOr<QkEstimate> QkGeneralSubsampling(
    int64_t N, int64_t m, int64_t s, int64_t g, int64_t k,
    const std::optional<McOptions>& mc) {
  if (s < 1) return absl::InvalidArgumentError("s should be positive.");
  RETURN_IF_ERROR(CheckHypergeometric(N, m * s, g));
  if (k < 0) return absl::InvalidArgumentError("k should be nonnegative.");
  QkEstimate out;
  if (m * s <= kExactMaxSlots && g <= kExactMaxGroup) {
    ASSIGN_OR_RETURN(RoundKDist dist, RoundDistGeneralSubsampling(N, m, s, g));
    out.value = k < static_cast<int64_t>(dist.probs.size()) ? dist.probs[k]
                                                             : 0.0;
    return out;
  }
  if (!mc.has_value()) {
    return absl::OutOfRangeError(absl::StrFormat(
        "m*s = %d, g = %d exceed exact limits and no Monte Carlo budget was "
        "given.",
        m * s, g));
  }
  if (mc->trials < 1) {
    return absl::InvalidArgumentError("trials should be positive.");
  }
  const int workers = std::max(1, mc->workers);
  std::vector<int64_t> hits(workers, 0);
  const int64_t slots = m * s;
  ParallelChunks(mc->trials, workers, [&](int chunk, int64_t begin,
                                          int64_t end) {
    int64_t local = 0;
    std::vector<int64_t> groups;
    for (int64_t t = begin; t < end; ++t) {
      Philox rng(mc->seed, static_cast<uint64_t>(t));
      // Positions of the marked samples in a uniform permutation; the round
      // takes the first m*s positions.
      const std::vector<uint64_t> pos = SampleDistinct(N, g, rng);
      groups.clear();
      for (uint64_t p : pos) {
        if (static_cast<int64_t>(p) < slots) groups.push_back(p / s);
      }
      std::sort(groups.begin(), groups.end());
      const int64_t touched =
          std::unique(groups.begin(), groups.end()) - groups.begin();
      if (touched == k) ++local;
    }
    hits[chunk] += local;
  });
  int64_t total = 0;
  for (int64_t h : hits) total += h;
  out.exact = false;
  out.value = static_cast<double>(total) / mc->trials;
  out.std_error = std::sqrt(out.value * (1.0 - out.value) / mc->trials);
  return out;
}

absl::StatusOr<double> Q1BatchSubsampling(int64_t N, int64_t s, int64_t g) {
  RETURN_IF_ERROR(CheckHypergeometric(N, s, g));
  if (N - g < s) return 1.0;
  double log_miss = 0.0;
  for (int64_t i = 0; i < s; ++i) {
    log_miss += std::log1p(-static_cast<double>(g) / (N - i));
  }
  return -std::expm1(log_miss);
}

absl::StatusOr<RoundKDist> QdistBcShuffling(int64_t N, int64_t s, int64_t g) {
  if (N < 1 || s < 1 || g < 1) {
    return absl::InvalidArgumentError("N, s and g should be positive.");
  }
  if (N % s != 0) {
    return absl::InvalidArgumentError("s should divide N.");
  }
  if (g > s) {
    return absl::OutOfRangeError(absl::StrFormat(
        "g = %d exceeds s = %d; only the lower bound applies.", g, s));
  }
  const int64_t bins = N / s;
  RoundKDist dist;
  dist.probs.assign(g + 1, 0.0);
  const double log_total = LogBinomial(bins - 1 + g, g);
  for (int64_t j = 1; j <= std::min(g, bins); ++j) {
    dist.probs[j] = std::exp(LogBinomial(bins, j) +
                             LogBinomial(g - 1, j - 1) - log_total);
  }
  return dist;
}

absl::StatusOr<RoundKDist> QdistBcShufflingOccupancy(int64_t N, int64_t s,
                                                     int64_t g) {
  if (N < 1 || s < 1 || g < 1 || g > N) {
    return absl::InvalidArgumentError(
        "N, s, g should be positive with g <= N.");
  }
  if (N % s != 0) return absl::InvalidArgumentError("s should divide N.");
  ASSIGN_OR_RETURN(std::vector<double> occ, GroupOccupancy(N / s, s, g));
  RoundKDist dist;
  dist.probs = std::move(occ);
  return dist;
}

absl::StatusOr<CVecDist> MultiroundCDist(const RoundKDist& round,
                                         int64_t rounds, double eps_trunc) {
  if (rounds < 1) return absl::InvalidArgumentError("rounds should be >= 1.");
  if (round.probs.empty()) {
    return absl::InvalidArgumentError("round distribution is empty.");
  }
  RETURN_IF_ERROR(CheckProbabilities(round.probs, 1e-10));
  const int64_t k_max = static_cast<int64_t>(round.probs.size()) - 1;
  Dense base{0, std::vector<double>(k_max * k_max + 1, 0.0)};
  for (int64_t k = 0; k <= k_max; ++k) base.p[k * k] += round.probs[k];
  return ToCVecDist(Power(base, rounds, eps_trunc), KahanSum(base.p));
}

absl::StatusOr<CVecDist> EpochConvolve(const CVecDist& per_epoch, int64_t E,
                                       double eps_trunc) {
  if (E < 1) return absl::InvalidArgumentError("E should be >= 1.");
  if (per_epoch.entries.empty()) {
    return absl::InvalidArgumentError("per-epoch distribution is empty.");
  }
  if (E == 1) return per_epoch;
  const int64_t lo = per_epoch.entries.begin()->first;
  const int64_t hi = per_epoch.entries.rbegin()->first;
  Dense base{lo, std::vector<double>(hi - lo + 1, 0.0)};
  for (const auto& [c2, p] : per_epoch.entries) base.p[c2 - lo] = p;
  const double mass_in =
      std::pow(1.0 - per_epoch.truncated_mass, static_cast<double>(E));
  CVecDist out = ToCVecDist(Power(base, E, eps_trunc), 1.0);
  // Mass lost upstream is not in the base vector; keep it in the tally.
  out.truncated_mass = std::max(0.0, out.truncated_mass - (1.0 - mass_in)) +
                       (1.0 - mass_in);
  return out;
}

absl::StatusOr<CVecDist> PerEpochCDist(const SamplerConfig& config,
                                       double eps_trunc) {
  RETURN_IF_ERROR(ValidateSamplerConfig(config));
  const SamplerConfig& c = config;
  if (c.strategy == Strategy::kSS) {
    RoundKDist round;
    switch (c.clipping) {
      case Clipping::kIC: {
        ASSIGN_OR_RETURN(round, RoundDistIcSubsampling(c.N, c.m, c.g));
        break;
      }
      case Clipping::kBC: {
        ASSIGN_OR_RETURN(double q1, Q1BatchSubsampling(c.N, c.s, c.g));
        round.probs = {1.0 - q1, q1};
        break;
      }
      case Clipping::kGEN: {
        ASSIGN_OR_RETURN(round,
                         RoundDistGeneralSubsampling(c.N, c.m, c.s, c.g));
        break;
      }
    }
    return MultiroundCDist(round, RoundsPerEpoch(c), eps_trunc);
  }
  CVecDist out;
  if (c.g == 1) {
    // The one differing sample lands in exactly one subset per epoch.
    out.entries[1] = 1.0;
    return out;
  }
  if (c.clipping == Clipping::kBC) {
    ASSIGN_OR_RETURN(RoundKDist q, QdistBcShuffling(c.N, c.s, c.g));
    for (size_t j = 1; j < q.probs.size(); ++j) {
      if (q.probs[j] > 0.0) out.entries[static_cast<int64_t>(j)] = q.probs[j];
    }
    return out;
  }
  return absl::UnimplementedError(absl::StrFormat(
      "no closed-form q for %s clipping with shuffling and g = %d.",
      ClippingName(c.clipping), c.g));
}

absl::StatusOr<CVecDist> RunCDist(const SamplerConfig& config,
                                  double eps_trunc) {
  ASSIGN_OR_RETURN(CVecDist epoch, PerEpochCDist(config, eps_trunc));
  return EpochConvolve(epoch, config.E, eps_trunc);
}

absl::StatusOr<MixtureSpec> CDistToMixture(const CVecDist& dist,
                                           double sigma) {
  if (dist.entries.empty()) {
    return absl::InvalidArgumentError("distribution is empty.");
  }
  std::vector<MixtureComponent> comps;
  comps.reserve(dist.entries.size());
  for (const auto& [c2, p] : dist.entries) {
    comps.push_back({std::sqrt(static_cast<double>(c2)), p});
  }
  comps.back().q += dist.truncated_mass;
  // Rounding in long convolutions leaves the total a few ulps off.
  double total = 0.0;
  for (const MixtureComponent& comp : comps) total += comp.q;
  if (std::abs(total - 1.0) > 1e-9) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "distribution mass %.17g is not 1 after folding.", total));
  }
  for (MixtureComponent& comp : comps) comp.q /= total;
  return MakeMixture(std::move(comps), sigma);
}

absl::StatusOr<TailPair> HoeffdingTails(double e_eff) {
  if (!(e_eff > 0.0) || std::isinf(e_eff)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("E_eff should be positive, got %g.", e_eff));
  }
  const double spread = 1.0 / std::sqrt(2.0 * e_eff);
  const double mass = std::exp(-e_eff);
  TailPair out;
  out.lower = {TailSide::kLower, std::sqrt((1.0 + spread) * e_eff), mass};
  double upper_sq = (1.0 - spread) * e_eff;
  if (upper_sq <= 0.0) {
    upper_sq = 0.0;
    out.degenerate = true;
  }
  out.upper = TailParams{TailSide::kUpper, std::sqrt(upper_sq), mass};
  return out;
}

absl::StatusOr<TailPair> ShufflingTailParams(int64_t N, int64_t m, int64_t s,
                                             int64_t g) {
  if (N < 1 || m < 1 || s < 1 || g < 1) {
    return absl::InvalidArgumentError("N, m, s and g should be positive.");
  }
  if (N <= g) return absl::InvalidArgumentError("N should exceed g.");
  const double gd = static_cast<double>(g);
  TailPair out;
  const double l = gd * gd * static_cast<double>(m * s) / (N - g);
  out.lower = {TailSide::kLower, std::sqrt(gd), std::min(1.0, l)};
  if (m == 1 && g <= s && N % s == 0) {
    const double bins = static_cast<double>(N / s);
    if (bins > gd + gd * gd) {
      const double u = gd * gd / (bins - gd - gd * gd);
      if (u < 1.0) out.upper = TailParams{TailSide::kUpper, std::sqrt(gd), u};
    }
  }
  return out;
}

absl::StatusOr<JointCounts> FilterTransform(const JointCounts& joint) {
  if (joint.empty()) return absl::InvalidArgumentError("joint is empty.");
  const size_t g = joint.begin()->first.size();
  double total = 0.0;
  for (const auto& [counts, p] : joint) {
    if (counts.size() != g) {
      return absl::InvalidArgumentError("count vectors differ in length.");
    }
    if (!(p >= 0.0)) {
      return absl::InvalidArgumentError("probabilities should be >= 0.");
    }
    for (int64_t c : counts) {
      if (c < 0) return absl::InvalidArgumentError("counts should be >= 0.");
    }
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-10) {
    return absl::InvalidArgumentError("joint distribution should sum to 1.");
  }
  JointCounts out;
  for (const auto& [counts, p] : joint) {
    JointCounts states{{std::vector<int64_t>(g, 0), p}};
    for (size_t level = 1; level <= g; ++level) {
      const double log_half = -static_cast<double>(level) * std::log(2.0);
      for (int64_t r = 0; r < counts[level - 1]; ++r) {
        JointCounts next;
        for (const auto& [state, w] : states) {
          for (size_t kept = 0; kept <= level; ++kept) {
            std::vector<int64_t> moved = state;
            if (kept > 0) ++moved[kept - 1];
            next[moved] += w * std::exp(LogBinomial(level, kept) + log_half);
          }
        }
        states = std::move(next);
      }
    }
    for (const auto& [state, w] : states) out[state] += w;
  }
  return out;
}

CVecDist JointToCDist(const JointCounts& joint) {
  CVecDist out;
  for (const auto& [counts, p] : joint) {
    int64_t c2 = 0;
    for (size_t k = 1; k <= counts.size(); ++k) {
      c2 += counts[k - 1] * static_cast<int64_t>(k * k);
    }
    out.entries[c2] += p;
  }
  return out;
}

}  // namespace fdp
