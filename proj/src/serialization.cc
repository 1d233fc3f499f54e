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

#include "fdp/serialization.h"

#include <cmath>
#include <cstdlib>
#include <set>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "fdp/status_macros.h"

namespace fdp {
namespace {

std::string InnerName(InnerMode mode) {
  switch (mode) {
    case InnerMode::kIcGrad:
      return "ic_grad";
    case InnerMode::kBcMean:
      return "bc_mean";
    case InnerMode::kSgdRecursion:
      return "sgd_recursion";
  }
  return "bc_mean";
}

Json NumberOrNull(double x) {
  if (!std::isfinite(x)) return nullptr;
  return Round12(x);
}

Json Numbers(const std::vector<double>& xs) {
  Json out = Json::array();
  for (double x : xs) out.push_back(NumberOrNull(x));
  return out;
}

template <typename T>
absl::StatusOr<T> Field(const Json& json, const char* key) {
  try {
    return json.at(key).get<T>();
  } catch (const std::exception& e) {
    return absl::InvalidArgumentError(
        absl::StrFormat("field '%s': %s", key, e.what()));
  }
}

}  // namespace

std::string FormatDouble(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return absl::StrFormat("%.12g", x);
}

double Round12(double x) {
  if (!std::isfinite(x)) return x;
  return std::strtod(absl::StrFormat("%.12g", x).c_str(), nullptr);
}

Json CurveToJson(const TradeoffCurve& curve) {
  Json out;
  if (curve.is_gaussian()) {
    out["kind"] = "gaussian";
    out["mu"] = Round12(curve.mu());
    return out;
  }
  out["kind"] = "grid";
  out["alphas"] = Numbers(curve.alphas());
  out["betas"] = Numbers(curve.betas());
  return out;
}

absl::StatusOr<TradeoffCurve> CurveFromJson(const Json& json) {
  ASSIGN_OR_RETURN(std::string kind, Field<std::string>(json, "kind"));
  if (kind == "gaussian") {
    ASSIGN_OR_RETURN(double mu, Field<double>(json, "mu"));
    return TradeoffCurve::Gaussian(mu);
  }
  if (kind == "grid") {
    ASSIGN_OR_RETURN(std::vector<double> alphas,
                     Field<std::vector<double>>(json, "alphas"));
    ASSIGN_OR_RETURN(std::vector<double> betas,
                     Field<std::vector<double>>(json, "betas"));
    return TradeoffCurve::Grid(std::move(alphas), std::move(betas));
  }
  return absl::InvalidArgumentError(
      absl::StrFormat("unknown curve kind '%s'.", kind));
}

std::string CurveToCsv(const TradeoffCurve& curve,
                       absl::Span<const double> alphas) {
  std::string out = "alpha,beta\n";
  for (double a : alphas) {
    absl::StrAppend(&out, FormatDouble(a), ",", FormatDouble(curve.Eval(a)),
                    "\n");
  }
  return out;
}

Json MixtureToJson(const MixtureSpec& spec) {
  Json out;
  out["sigma"] = Round12(spec.sigma);
  Json comps = Json::array();
  for (const MixtureComponent& c : spec.components) {
    comps.push_back(Json::array({Round12(c.c), Round12(c.q)}));
  }
  out["components"] = comps;
  return out;
}

absl::StatusOr<MixtureSpec> MixtureFromJson(const Json& json) {
  ASSIGN_OR_RETURN(double sigma, Field<double>(json, "sigma"));
  ASSIGN_OR_RETURN(std::vector<std::vector<double>> rows,
                   (Field<std::vector<std::vector<double>>>(json,
                                                            "components")));
  std::vector<MixtureComponent> comps;
  for (const std::vector<double>& row : rows) {
    if (row.size() != 2) {
      return absl::InvalidArgumentError("components are [c, q] pairs.");
    }
    comps.push_back({row[0], row[1]});
  }
  return MakeMixture(std::move(comps), sigma);
}

Json TailToJson(const TailParams& tail) {
  Json out;
  out["side"] = tail.side == TailSide::kLower ? "lower" : "upper";
  out["c"] = Round12(tail.c_star);
  out["mass"] = Round12(tail.mass);
  return out;
}

Json SandwichToJson(const SandwichReport& report) {
  Json out;
  out["max_violation"] = Round12(report.max_violation);
  out["argmax_alpha"] = Round12(report.argmax_alpha);
  out["pair"] = report.pair;
  return out;
}

Json CVecDistToJson(const CVecDist& dist) {
  Json out = Json::object();
  for (const auto& [c2, p] : dist.entries) {
    out[std::to_string(c2)] = Round12(p);
  }
  return out;
}

std::string CVecDistToCsv(const CVecDist& dist) {
  std::string out = "c2,prob\n";
  for (const auto& [c2, p] : dist.entries) {
    absl::StrAppend(&out, c2, ",", FormatDouble(p), "\n");
  }
  return out;
}

Json SamplerConfigToJson(const SamplerConfig& c) {
  Json out;
  out["N"] = c.N;
  out["s"] = c.s;
  out["m"] = c.m;
  out["E"] = c.E;
  out["g"] = c.g;
  out["strategy"] = StrategyName(c.strategy);
  out["clipping"] = ClippingName(c.clipping);
  return out;
}

Json BundleToJson(const GuaranteeBundle& b) {
  Json out;
  out["config"] = SamplerConfigToJson(b.config);
  out["sigma"] = Round12(b.sigma);
  out["row"] = b.row;
  out["approx_mu"] = Round12(b.approx_mu);
  out["exact_f"] = b.exact_f.has_value() ? CurveToJson(*b.exact_f) : nullptr;
  out["lower"] = CurveToJson(b.lower);
  out["upper"] = b.upper.has_value() ? CurveToJson(*b.upper) : nullptr;
  out["lower_tail"] = b.lower_tail.has_value() ? TailToJson(*b.lower_tail)
                                               : nullptr;
  out["upper_tail"] = b.upper_tail.has_value() ? TailToJson(*b.upper_tail)
                                               : nullptr;
  out["degenerate"] = b.degenerate;
  Json samples = Json::array();
  for (const EpsDelta& ed : b.eps_delta_samples) {
    samples.push_back(
        {{"epsilon", Round12(ed.epsilon)}, {"delta", Round12(ed.delta)}});
  }
  out["eps_delta_samples"] = samples;
  const DivergenceSummary& d = b.divergences;
  out["divergences"] = {
      {"rdp_order", Round12(d.rdp_order)},
      {"rdp_eps", Round12(d.rdp_eps)},
      {"zcdp_rho", Round12(d.zcdp_rho)},
      {"tcdp", {{"rho", Round12(d.tcdp_rho)}, {"omega", Round12(d.tcdp_omega)}}},
  };
  return out;
}

std::string BundleToCsv(const GuaranteeBundle& b,
                        absl::Span<const double> alphas) {
  std::string out = "alpha,lower,exact,upper\n";
  for (double a : alphas) {
    absl::StrAppend(&out, FormatDouble(a), ",", FormatDouble(b.lower.Eval(a)),
                    ",", b.exact_f ? FormatDouble(b.exact_f->Eval(a)) : "",
                    ",", b.upper ? FormatDouble(b.upper->Eval(a)) : "", "\n");
  }
  return out;
}

std::string GroupComparisonToCsv(const GroupComparison& cmp) {
  std::string out = "alpha,direct,iterated\n";
  const auto& a = cmp.direct.alphas();
  for (size_t i = 0; i < a.size(); ++i) {
    absl::StrAppend(&out, FormatDouble(a[i]), ",",
                    FormatDouble(cmp.direct.betas()[i]), ",",
                    FormatDouble(cmp.iterated.betas()[i]), "\n");
  }
  return out;
}

std::string MetricsToCsv(const std::vector<EpochMetrics>& metrics) {
  std::string out = "epoch,loss,accuracy,eta\n";
  for (const EpochMetrics& m : metrics) {
    absl::StrAppend(&out, m.epoch, ",", FormatDouble(m.loss), ",",
                    FormatDouble(m.accuracy), ",", FormatDouble(m.eta), "\n");
  }
  return out;
}

Json ModelToJson(const Model& model) {
  Json out;
  out["loss"] = model.loss == LossKind::kSquared ? "squared" : "logistic";
  out["weights"] = Numbers(model.weights);
  return out;
}

absl::StatusOr<TrainConfig> TrainConfigFromJson(const Json& json) {
  if (!json.is_object()) {
    return absl::InvalidArgumentError("train config should be a JSON object.");
  }
  static const std::set<std::string> kKnown = {
      "N",        "s",       "m",         "E",      "g",
      "strategy", "clipping", "sigma",    "clip_C", "eta0",
      "lr_decay", "epochs",  "seed",      "noise_scale",
      "loss",     "inner",   "inner_eta", "data",   "test_data",
      "synthetic"};
  for (const auto& [key, value] : json.items()) {
    if (!kKnown.count(key)) {
      return absl::InvalidArgumentError(
          absl::StrFormat("unknown config key '%s'.", key));
    }
  }
  TrainConfig c;
  try {
    c.sampler.N = json.value("N", c.sampler.N);
    c.sampler.s = json.value("s", c.sampler.s);
    c.sampler.m = json.value("m", c.sampler.m);
    c.sampler.E = json.value("E", c.sampler.E);
    c.sampler.g = json.value("g", c.sampler.g);
    c.sigma = json.value("sigma", c.sigma);
    c.clip_C = json.value("clip_C", c.clip_C);
    c.eta0 = json.value("eta0", c.eta0);
    c.lr_decay = json.value("lr_decay", c.lr_decay);
    c.epochs = json.value("epochs", c.epochs);
    c.seed = json.value("seed", c.seed);
    c.inner_eta = json.value("inner_eta", c.inner_eta);
    ASSIGN_OR_RETURN(c.sampler.strategy,
                     ParseStrategy(json.value("strategy", std::string("sh"))));
    ASSIGN_OR_RETURN(c.sampler.clipping,
                     ParseClipping(json.value("clipping", std::string("bc"))));
    const std::string noise = json.value("noise_scale", std::string("two_c"));
    if (noise == "two_c") {
      c.noise_scale = NoiseScale::kTwoC;
    } else if (noise == "one_c") {
      c.noise_scale = NoiseScale::kOneC;
    } else {
      return absl::InvalidArgumentError("noise_scale is two_c or one_c.");
    }
    const std::string loss = json.value("loss", std::string("logistic"));
    if (loss == "squared") {
      c.loss = LossKind::kSquared;
    } else if (loss == "logistic") {
      c.loss = LossKind::kLogistic;
    } else {
      return absl::InvalidArgumentError("loss is squared or logistic.");
    }
    const std::string default_inner =
        c.sampler.clipping == Clipping::kIC ? "ic_grad" : "bc_mean";
    const std::string inner = json.value("inner", default_inner);
    if (inner == InnerName(InnerMode::kIcGrad)) {
      c.inner = InnerMode::kIcGrad;
    } else if (inner == InnerName(InnerMode::kBcMean)) {
      c.inner = InnerMode::kBcMean;
    } else if (inner == InnerName(InnerMode::kSgdRecursion)) {
      c.inner = InnerMode::kSgdRecursion;
    } else {
      return absl::InvalidArgumentError(
          "inner is ic_grad, bc_mean or sgd_recursion.");
    }
  } catch (const std::exception& e) {
    return absl::InvalidArgumentError(
        absl::StrCat("malformed train config: ", e.what()));
  }
  return c;
}

Json OracleReportToJson(const std::vector<OracleCheck>& checks) {
  Json out;
  bool all = true;
  Json list = Json::array();
  for (const OracleCheck& c : checks) {
    all = all && c.passed;
    list.push_back({{"name", c.name},
                    {"passed", c.passed},
                    {"statistic", Round12(c.statistic)},
                    {"threshold", Round12(c.threshold)},
                    {"seed", c.seed},
                    {"detail", c.detail}});
  }
  out["all_passed"] = all;
  out["checks"] = list;
  return out;
}

}  // namespace fdp
