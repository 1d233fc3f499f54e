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

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <utility>

#include "absl/strings/str_format.h"
#include "fdp/normal.h"
#include "fdp/status_macros.h"

namespace fdp {
namespace {

constexpr double kMassTolerance = 1e-12;

struct Split {
  double q0 = 0.0;  // mass at c = 0
  std::vector<double> mus;
  std::vector<double> qs;
  double q_plus = 0.0;
};

Split SplitSpec(const MixtureSpec& spec) {
  Split split;
  for (const MixtureComponent& comp : spec.components) {
    if (comp.c == 0.0) {
      split.q0 += comp.q;
    } else {
      split.mus.push_back(comp.c / spec.sigma);
      split.qs.push_back(comp.q);
      split.q_plus += comp.q;
    }
  }
  return split;
}

// Solves sum_i q_i Phibar(L/mu_i + mu_i/2) = a_plus for 0 < a_plus < q_plus,
// where a_plus is the Type-I error carried by the Gaussian components.
absl::StatusOr<double> SolveGaussianPart(const Split& split, double a_plus) {
  const double rel = a_plus / split.q_plus;
  const double z = NormalUpperQuantile(rel);
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (double mu : split.mus) {
    const double li = mu * (z - mu / 2.0);
    lo = std::min(lo, li);
    hi = std::max(hi, li);
  }
  if (lo == hi) return lo;
  // Upper-tail form keeps relative precision for small a_plus, the lower-tail
  // form for a_plus near q_plus.
  const bool upper_form = rel <= 0.5;
  const double b_plus = split.q_plus - a_plus;
  auto residual = [&](double lambda) {
    double sum = 0.0;
    for (size_t i = 0; i < split.mus.size(); ++i) {
      const double x = lambda / split.mus[i] + split.mus[i] / 2.0;
      sum += split.qs[i] * (upper_form ? NormalSurvival(x) : NormalCdf(x));
    }
    // Increasing in lambda either way.
    return upper_form ? a_plus - sum : sum - b_plus;
  };
  const double pad = 1e-12 * (1.0 + std::max(std::abs(lo), std::abs(hi)));
  lo -= pad;
  hi += pad;
  absl::StatusOr<double> root = SolveBracketed(residual, lo, hi);
  if (root.ok()) return root;
  if (absl::IsFailedPrecondition(root.status())) {
    // Rounding can leave both ends on one side of a root that sits on the
    // bracket edge.
    return std::abs(residual(lo)) < std::abs(residual(hi)) ? lo : hi;
  }
  return absl::InternalError(absl::StrFormat(
      "lambda solve did not converge at alpha-part %g: %s", a_plus,
      root.status().message()));
}

struct LambdaSolution {
  double lambda = 0.0;
  double value = 0.0;  // f(alpha)
};

absl::StatusOr<LambdaSolution> SolveMixture(const MixtureSpec& spec,
                                            double alpha) {
  LambdaSolution out;
  if (alpha <= 0.0) {
    out.lambda = std::numeric_limits<double>::infinity();
    out.value = 1.0;
    return out;
  }
  if (alpha >= 1.0) {
    out.lambda = -std::numeric_limits<double>::infinity();
    out.value = 0.0;
    return out;
  }
  const Split split = SplitSpec(spec);
  if (split.mus.empty()) {
    out.lambda = 0.0;
    out.value = 1.0 - alpha;
    return out;
  }
  // At lambda = 0 every Gaussian sits at its slope -1 point.
  double a_at_zero = 0.0;
  double f_at_zero = 0.0;
  for (size_t i = 0; i < split.mus.size(); ++i) {
    a_at_zero += split.qs[i] * NormalSurvival(split.mus[i] / 2.0);
    f_at_zero += split.qs[i] * NormalCdf(-split.mus[i] / 2.0);
  }
  double a_plus;
  double identity_part;
  if (alpha < a_at_zero) {
    // Identity component fully accepting: alpha_0 = 0.
    a_plus = alpha;
    identity_part = split.q0;
  } else if (alpha <= a_at_zero + split.q0) {
    out.lambda = 0.0;
    out.value = f_at_zero + split.q0 - (alpha - a_at_zero);
    return out;
  } else {
    a_plus = alpha - split.q0;
    identity_part = 0.0;
  }
  ASSIGN_OR_RETURN(out.lambda, SolveGaussianPart(split, a_plus));
  double value = identity_part;
  for (size_t i = 0; i < split.mus.size(); ++i) {
    value += split.qs[i] *
             NormalCdf(out.lambda / split.mus[i] - split.mus[i] / 2.0);
  }
  out.value = std::clamp(value, 0.0, 1.0 - alpha);
  return out;
}

double Gaussian(double c, double sigma, double alpha) {
  return GaussianTradeoff(c / sigma, alpha);
}

absl::Status CheckTail(const TailParams& tail, double sigma) {
  if (!(sigma > 0.0)) {
    return absl::InvalidArgumentError("sigma should be positive.");
  }
  if (!(tail.c_star >= 0.0) || std::isinf(tail.c_star)) {
    return absl::InvalidArgumentError(
        "tail c_star should be finite and nonnegative.");
  }
  if (!(tail.mass >= 0.0 && tail.mass <= 1.0)) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "tail mass should be in [0,1], got %g.", tail.mass));
  }
  return absl::OkStatus();
}

absl::StatusOr<TradeoffCurve> SampleWithKnots(
    absl::Span<const double> alphas, std::vector<double> knots,
    const std::function<absl::StatusOr<double>(double)>& eval) {
  std::vector<double> xs(alphas.begin(), alphas.end());
  for (double k : knots) {
    if (k > 0.0 && k < 1.0) xs.push_back(k);
  }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  std::vector<double> ys(xs.size());
  for (size_t i = 0; i < xs.size(); ++i) {
    ASSIGN_OR_RETURN(ys[i], eval(xs[i]));
  }
  return TradeoffCurve::Grid(std::move(xs), std::move(ys), /*symmetric=*/true);
}

}  // namespace

absl::StatusOr<MixtureSpec> MakeMixture(std::vector<MixtureComponent> comps,
                                        double sigma) {
  std::sort(comps.begin(), comps.end(),
            [](const MixtureComponent& a, const MixtureComponent& b) {
              return a.c < b.c;
            });
  MixtureSpec spec;
  spec.sigma = sigma;
  for (const MixtureComponent& comp : comps) {
    if (comp.q == 0.0) continue;
    if (!spec.components.empty() && spec.components.back().c == comp.c) {
      spec.components.back().q += comp.q;
    } else {
      spec.components.push_back(comp);
    }
  }
  RETURN_IF_ERROR(ValidateMixture(spec));
  return spec;
}

absl::Status ValidateMixture(const MixtureSpec& spec) {
  if (!(spec.sigma > 0.0) || std::isinf(spec.sigma)) {
    return absl::InvalidArgumentError("sigma should be finite and positive.");
  }
  if (spec.components.empty()) {
    return absl::InvalidArgumentError("mixture has no components.");
  }
  double total = 0.0;
  for (size_t i = 0; i < spec.components.size(); ++i) {
    const MixtureComponent& comp = spec.components[i];
    if (!(comp.c >= 0.0) || std::isinf(comp.c)) {
      return absl::InvalidArgumentError(absl::StrFormat(
          "component c should be finite and nonnegative, got %g.", comp.c));
    }
    if (!(comp.q > 0.0 && comp.q <= 1.0)) {
      return absl::InvalidArgumentError(absl::StrFormat(
          "component q should be in (0,1], got %g.", comp.q));
    }
    if (i > 0 && !(comp.c > spec.components[i - 1].c)) {
      return absl::InvalidArgumentError(
          "component c values should be strictly increasing.");
    }
    total += comp.q;
  }
  if (std::abs(total - 1.0) > kMassTolerance) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "component masses should sum to 1, got %.17g.", total));
  }
  return absl::OkStatus();
}

absl::Status ValidateTail(const TailParams& tail, const MixtureSpec& spec) {
  RETURN_IF_ERROR(CheckTail(tail, spec.sigma));
  double beyond = 0.0;
  for (const MixtureComponent& comp : spec.components) {
    if (tail.side == TailSide::kLower ? comp.c > tail.c_star
                                      : comp.c < tail.c_star) {
      beyond += comp.q;
    }
  }
  if (beyond > tail.mass + kMassTolerance) {
    return absl::FailedPreconditionError(absl::StrFormat(
        "%s tail at c = %g carries mass %g but only %g was declared.",
        tail.side == TailSide::kLower ? "lower" : "upper", tail.c_star,
        beyond, tail.mass));
  }
  return absl::OkStatus();
}

absl::StatusOr<double> SolveLambda(const MixtureSpec& spec, double alpha) {
  RETURN_IF_ERROR(ValidateMixture(spec));
  ASSIGN_OR_RETURN(LambdaSolution sol, SolveMixture(spec, alpha));
  return sol.lambda;
}

absl::StatusOr<double> MixtureTradeoff(const MixtureSpec& spec, double alpha) {
  RETURN_IF_ERROR(ValidateMixture(spec));
  ASSIGN_OR_RETURN(LambdaSolution sol, SolveMixture(spec, alpha));
  return sol.value;
}

absl::StatusOr<TradeoffCurve> MixtureCurve(const MixtureSpec& spec,
                                           absl::Span<const double> alphas) {
  RETURN_IF_ERROR(ValidateMixture(spec));
  std::vector<double> xs(alphas.begin(), alphas.end());
  std::vector<double> ys(xs.size());
  for (size_t i = 0; i < xs.size(); ++i) {
    ASSIGN_OR_RETURN(LambdaSolution sol, SolveMixture(spec, xs[i]));
    ys[i] = sol.value;
  }
  return TradeoffCurve::Grid(std::move(xs), std::move(ys), /*symmetric=*/true);
}

absl::StatusOr<double> LowerBoundBeta(const TailParams& tail, double sigma) {
  RETURN_IF_ERROR(CheckTail(tail, sigma));
  const double mu = tail.c_star / sigma;
  const double l = tail.mass;
  if (l == 0.0) return NormalCdf(-mu / 2.0);
  auto residual = [mu, l](double beta) {
    return GaussianTradeoff(mu, beta) - l - beta;
  };
  return SolveBracketed(residual, 0.0, 1.0);
}

absl::StatusOr<UpperKnots> UpperBoundKnots(const TailParams& tail,
                                           double sigma) {
  RETURN_IF_ERROR(CheckTail(tail, sigma));
  const double u = tail.mass;
  if (u >= 1.0) {
    return absl::InvalidArgumentError(
        absl::StrFormat("upper tail mass should be below 1, got %g.", u));
  }
  const double mu = tail.c_star / sigma;
  UpperKnots knots;
  if (mu == 0.0) {
    knots.beta0 = u == 0.0 ? 0.5 : 0.0;
    knots.beta1 = u == 0.0 ? 0.5 : 1.0;
    return knots;
  }
  const double shift = std::log1p(-u) / mu;
  knots.beta0 = NormalSurvival(mu / 2.0 - shift);
  knots.beta1 = u + (1.0 - u) * NormalSurvival(mu / 2.0 + shift);
  return knots;
}

double LowerHatEval(const TailParams& tail, double sigma, double alpha) {
  return Gaussian(tail.c_star, sigma, std::min(1.0, alpha + tail.mass));
}

double UpperHatEval(const TailParams& tail, double sigma, double alpha) {
  return tail.mass + (1.0 - tail.mass) * Gaussian(tail.c_star, sigma, alpha);
}

absl::StatusOr<double> LowerBoundEval(const TailParams& tail, double sigma,
                                      double alpha) {
  RETURN_IF_ERROR(CheckTail(tail, sigma));
  alpha = std::clamp(alpha, 0.0, 1.0);
  const double shifted = LowerHatEval(tail, sigma, alpha);
  const double reflected = Gaussian(tail.c_star, sigma, alpha) - tail.mass;
  return std::max({0.0, shifted, reflected});
}

absl::StatusOr<double> UpperBoundEval(const TailParams& tail, double sigma,
                                      double alpha) {
  ASSIGN_OR_RETURN(UpperKnots knots, UpperBoundKnots(tail, sigma));
  alpha = std::clamp(alpha, 0.0, 1.0);
  const double u = tail.mass;
  if (alpha <= knots.beta0) return UpperHatEval(tail, sigma, alpha);
  if (alpha <= knots.beta1) return knots.beta0 + knots.beta1 - alpha;
  return Gaussian(tail.c_star, sigma, (alpha - u) / (1.0 - u));
}

absl::StatusOr<TradeoffCurve> LowerBoundCurve(const TailParams& tail,
                                              double sigma,
                                              absl::Span<const double> alphas) {
  ASSIGN_OR_RETURN(double beta, LowerBoundBeta(tail, sigma));
  return SampleWithKnots(alphas, {beta, 1.0 - tail.mass},
                         [&](double a) { return LowerBoundEval(tail, sigma, a); });
}

absl::StatusOr<TradeoffCurve> UpperBoundCurve(const TailParams& tail,
                                              double sigma,
                                              absl::Span<const double> alphas) {
  ASSIGN_OR_RETURN(UpperKnots knots, UpperBoundKnots(tail, sigma));
  return SampleWithKnots(alphas, {knots.beta0, knots.beta1},
                         [&](double a) { return UpperBoundEval(tail, sigma, a); });
}

absl::StatusOr<SandwichReport> SandwichCheck(
    const MixtureSpec& spec, const TailParams& lower,
    const std::optional<TailParams>& upper, absl::Span<const double> alphas) {
  RETURN_IF_ERROR(ValidateMixture(spec));
  RETURN_IF_ERROR(CheckTail(lower, spec.sigma));
  if (upper.has_value()) RETURN_IF_ERROR(CheckTail(*upper, spec.sigma));
  SandwichReport report;
  report.pair = "none";
  auto record = [&report](double gap, double alpha, const char* pair) {
    if (gap > report.max_violation) {
      report.max_violation = gap;
      report.argmax_alpha = alpha;
      report.pair = pair;
    }
  };
  for (double alpha : alphas) {
    const double lo_hat = LowerHatEval(lower, spec.sigma, alpha);
    ASSIGN_OR_RETURN(double lo, LowerBoundEval(lower, spec.sigma, alpha));
    ASSIGN_OR_RETURN(LambdaSolution sol, SolveMixture(spec, alpha));
    record(lo_hat - lo, alpha, "lower_hat<=lower");
    record(lo - sol.value, alpha, "lower<=exact");
    if (upper.has_value()) {
      ASSIGN_OR_RETURN(double up, UpperBoundEval(*upper, spec.sigma, alpha));
      const double up_hat = UpperHatEval(*upper, spec.sigma, alpha);
      record(sol.value - up, alpha, "exact<=upper");
      record(up - up_hat, alpha, "upper<=upper_hat");
    }
  }
  return report;
}

}  // namespace fdp
