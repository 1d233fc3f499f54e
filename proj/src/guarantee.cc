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

#include "fdp/guarantee.h"

#include <algorithm>
#include <cmath>
#include <utility>

#include "absl/strings/str_format.h"
#include "fdp/status_macros.h"

namespace fdp {
namespace {

constexpr double kDominanceTolerance = 1e-9;

double ResolveGamma(double gamma, int64_t g) {
  return gamma > 0.0 ? gamma : 1.0 / static_cast<double>(g);
}

absl::Status SetLowerTail(GuaranteeBundle& b, const TailParams& tail,
                          const GuaranteeOptions& options) {
  b.lower_tail = tail;
  ASSIGN_OR_RETURN(b.lower, LowerBoundCurve(tail, b.sigma, options.alphas));
  return absl::OkStatus();
}

absl::Status SetUpperTail(GuaranteeBundle& b, const TailParams& tail,
                          const GuaranteeOptions& options) {
  b.upper_tail = tail;
  ASSIGN_OR_RETURN(TradeoffCurve upper,
                   UpperBoundCurve(tail, b.sigma, options.alphas));
  b.upper = std::move(upper);
  return absl::OkStatus();
}

absl::Status HoeffdingRow(GuaranteeBundle& b, double e_eff,
                          const GuaranteeOptions& options) {
  ASSIGN_OR_RETURN(TailPair tails, HoeffdingTails(e_eff));
  b.degenerate = tails.degenerate;
  RETURN_IF_ERROR(SetLowerTail(b, tails.lower, options));
  return SetUpperTail(b, *tails.upper, options);
}

absl::Status IndividualSubsamplingGroupRow(GuaranteeBundle& b,
                                           const GuaranteeOptions& options) {
  const SamplerConfig& c = b.config;
  if (c.N <= c.g + c.m) {
    return absl::InvalidArgumentError(
        "individual clipping with g >= 2 needs N > g + m.");
  }
  const double gamma = ResolveGamma(options.gamma, c.g);
  const double beta =
      std::exp(static_cast<double>(c.N) / (c.N - c.g - c.m)) + gamma;
  const double ge = static_cast<double>(c.g) * c.E;
  const TailParams tail{
      TailSide::kLower,
      std::sqrt(beta * static_cast<double>(std::min(c.m, c.g)) * ge),
      std::exp(-gamma * ge)};
  return SetLowerTail(b, tail, options);
}

absl::Status ShufflingGroupRow(GuaranteeBundle& b,
                               const GuaranteeOptions& options) {
  const SamplerConfig& c = b.config;
  ASSIGN_OR_RETURN(TailPair per_epoch,
                   ShufflingTailParams(c.N, c.m, c.s, c.g));
  // Gaussian parts compose to sqrt(gE); the tail offsets add up.
  const TailParams tail{TailSide::kLower,
                        std::sqrt(static_cast<double>(c.g) * c.E),
                        std::min(1.0, per_epoch.lower.mass * c.E)};
  return SetLowerTail(b, tail, options);
}

absl::Status BatchShufflingRow(GuaranteeBundle& b,
                               const GuaranteeOptions& options) {
  const SamplerConfig& c = b.config;
  const double root_ge = std::sqrt(static_cast<double>(c.g) * c.E);
  ASSIGN_OR_RETURN(b.lower, TradeoffCurve::Gaussian(root_ge / b.sigma));
  b.lower_tail = TailParams{TailSide::kLower, root_ge, 0.0};
  if (c.g > c.s) {
    b.row = "bc-sh g>s";
    return absl::OkStatus();
  }
  b.row = "bc-sh g<=s";
  ASSIGN_OR_RETURN(CVecDist dist, RunCDist(c, options.eps_trunc));
  ASSIGN_OR_RETURN(MixtureSpec spec, CDistToMixture(dist, b.sigma));
  ASSIGN_OR_RETURN(TradeoffCurve exact, MixtureCurve(spec, options.alphas));
  b.exact_mixture = std::move(spec);
  b.exact_f = std::move(exact);
  ASSIGN_OR_RETURN(TailPair per_epoch,
                   ShufflingTailParams(c.N, c.m, c.s, c.g));
  if (per_epoch.upper.has_value()) {
    const double u = per_epoch.upper->mass * c.E;
    if (u < 1.0) {
      RETURN_IF_ERROR(
          SetUpperTail(b, TailParams{TailSide::kUpper, root_ge, u}, options));
    }
  }
  return absl::OkStatus();
}

}  // namespace

absl::StatusOr<double> HeadlineMu(const SamplerConfig& config, double sigma,
                                  double gamma) {
  RETURN_IF_ERROR(ValidateSamplerConfig(config));
  if (!(sigma > 0.0)) {
    return absl::InvalidArgumentError("sigma should be positive.");
  }
  const double ge = static_cast<double>(config.g) * config.E;
  if (config.strategy == Strategy::kSS && config.clipping == Clipping::kIC &&
      config.g >= 2) {
    const double factor = M_E + ResolveGamma(gamma, config.g);
    return std::sqrt(factor * std::min(config.m, config.g) * ge) / sigma;
  }
  return std::sqrt(ge) / sigma;
}

absl::StatusOr<GuaranteeBundle> Analyze(const SamplerConfig& config,
                                        double sigma,
                                        const GuaranteeOptions& options) {
  RETURN_IF_ERROR(ValidateSamplerConfig(config));
  if (!(sigma > 0.0) || std::isinf(sigma)) {
    return absl::InvalidArgumentError("sigma should be finite and positive.");
  }
  GuaranteeBundle b;
  b.config = config;
  b.sigma = sigma;
  const SamplerConfig& c = config;
  const double E = static_cast<double>(c.E);
  if (c.strategy == Strategy::kSS) {
    if (c.clipping == Clipping::kBC) {
      b.row = "bc-ss";
      ASSIGN_OR_RETURN(double q1, Q1BatchSubsampling(c.N, c.s, c.g));
      const double e_eff = static_cast<double>(c.N / c.s) * E * q1;
      RETURN_IF_ERROR(HoeffdingRow(b, e_eff, options));
    } else if (c.g == 1) {
      b.row = ClippingName(c.clipping) + "-ss g=1";
      RETURN_IF_ERROR(HoeffdingRow(b, E, options));
    } else if (c.clipping == Clipping::kIC) {
      b.row = "ic-ss g>=2";
      RETURN_IF_ERROR(IndividualSubsamplingGroupRow(b, options));
    } else {
      return absl::UnimplementedError(
          "no guarantee row for general clipping with subsampling and "
          "g >= 2.");
    }
  } else if (c.g == 1) {
    b.row = ClippingName(c.clipping) + "-sh g=1";
    ASSIGN_OR_RETURN(TradeoffCurve exact,
                     TradeoffCurve::Gaussian(std::sqrt(E) / sigma));
    b.exact_f = exact;
    b.lower = exact;
    b.upper = exact;
    b.lower_tail = TailParams{TailSide::kLower, std::sqrt(E), 0.0};
    b.upper_tail = TailParams{TailSide::kUpper, std::sqrt(E), 0.0};
  } else if (c.clipping == Clipping::kBC) {
    RETURN_IF_ERROR(BatchShufflingRow(b, options));
  } else {
    b.row = ClippingName(c.clipping) + "-sh g>=2";
    RETURN_IF_ERROR(ShufflingGroupRow(b, options));
  }
  ASSIGN_OR_RETURN(b.approx_mu, HeadlineMu(c, sigma, options.gamma));
  if (b.row == "ic-ss g>=2") b.approx_mu = b.lower_tail->c_star / sigma;
  for (double eps : options.epsilons) {
    ASSIGN_OR_RETURN(double delta, DeltaOfEpsilon(b.lower, eps));
    b.eps_delta_samples.push_back({eps, delta});
  }
  ASSIGN_OR_RETURN(b.divergences, GdpToDivergences(b.approx_mu, options.omega));
  return b;
}

absl::StatusOr<GroupComparison> CompareGroupPaths(
    const SamplerConfig& config, double sigma,
    const GuaranteeOptions& options) {
  ASSIGN_OR_RETURN(GuaranteeBundle direct, Analyze(config, sigma, options));
  SamplerConfig single = config;
  single.g = 1;
  ASSIGN_OR_RETURN(GuaranteeBundle base, Analyze(single, sigma, options));
  ASSIGN_OR_RETURN(TradeoffCurve iterated,
                   GroupIterate(base.lower, static_cast<int>(config.g)));
  GroupComparison out;
  out.direct_mu = direct.approx_mu;
  out.iterated_mu = static_cast<double>(config.g) * base.approx_mu;
  out.direct = TradeoffCurve::Sampled(direct.lower, options.alphas);
  out.iterated = TradeoffCurve::Sampled(iterated, options.alphas);
  for (size_t i = 0; i < options.alphas.size(); ++i) {
    out.max_violation = std::max(
        out.max_violation, out.iterated.betas()[i] - out.direct.betas()[i]);
  }
  out.direct_dominates = out.max_violation <= kDominanceTolerance;
  return out;
}

}  // namespace fdp
