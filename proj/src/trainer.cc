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

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "absl/status/status.h"
#include "absl/strings/str_format.h"
#include "fdp/status_macros.h"

namespace fdp {
namespace {

constexpr uint64_t kSampleStream = uint64_t{1} << 56;
constexpr uint64_t kNoiseStream = uint64_t{2} << 56;

double Dot(const std::vector<double>& w, const std::vector<double>& x) {
  double z = w.back();
  for (size_t i = 0; i < x.size(); ++i) z += w[i] * x[i];
  return z;
}

// Scaled by the largest entry so huge gradients do not overflow to inf.
double Norm(const std::vector<double>& x) {
  double big = 0.0;
  for (double v : x) big = std::max(big, std::abs(v));
  if (big == 0.0 || !std::isfinite(big)) return big;
  double sum = 0.0;
  for (double v : x) sum += (v / big) * (v / big);
  return big * std::sqrt(sum);
}

void AddTo(std::vector<double>& acc, const std::vector<double>& x,
           double scale = 1.0) {
  for (size_t i = 0; i < acc.size(); ++i) acc[i] += scale * x[i];
}

double Sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

int64_t EpochCount(const TrainConfig& config) {
  return config.epochs > 0 ? config.epochs : config.sampler.E;
}

bool RowsDiffer(const Dataset& a, const Dataset& b, int64_t i) {
  return a.labels[i] != b.labels[i] || a.features[i] != b.features[i];
}

}  // namespace

std::vector<Round> SampleEpoch(const SamplerConfig& config, Philox& rng) {
  const int64_t per_round = config.m * config.s;
  const int64_t rounds = RoundsPerEpoch(config);
  std::vector<int64_t> order;
  if (config.strategy == Strategy::kSH) {
    order.resize(config.N);
    std::iota(order.begin(), order.end(), 0);
    Shuffle(order, rng);
  }
  std::vector<Round> epoch(rounds);
  for (int64_t b = 0; b < rounds; ++b) {
    std::vector<int64_t> picks;
    if (config.strategy == Strategy::kSH) {
      picks.assign(order.begin() + b * per_round,
                   order.begin() + (b + 1) * per_round);
    } else {
      const std::vector<uint64_t> drawn =
          SampleDistinct(config.N, per_round, rng);
      picks.assign(drawn.begin(), drawn.end());
      // Floyd's draw order is not exchangeable; shuffle before splitting.
      Shuffle(picks, rng);
    }
    Round& round = epoch[b];
    round.resize(config.m);
    for (int64_t h = 0; h < config.m; ++h) {
      round[h].assign(picks.begin() + h * config.s,
                      picks.begin() + (h + 1) * config.s);
    }
  }
  return epoch;
}

std::vector<double> Clip(const std::vector<double>& x, double C) {
  const double scale = std::max(1.0, Norm(x) / C);
  std::vector<double> out(x);
  if (scale > 1.0) {
    for (double& v : out) v /= scale;
  }
  return out;
}

std::vector<double> Gradient(const Model& model,
                             const std::vector<double>& features,
                             double label) {
  const double z = Dot(model.weights, features);
  const double r =
      model.loss == LossKind::kSquared ? z - label : Sigmoid(z) - label;
  std::vector<double> grad(model.weights.size());
  for (size_t i = 0; i < features.size(); ++i) grad[i] = r * features[i];
  grad.back() = r;
  return grad;
}

double Loss(const Model& model, const std::vector<double>& features,
            double label) {
  const double z = Dot(model.weights, features);
  if (model.loss == LossKind::kSquared) return 0.5 * (z - label) * (z - label);
  return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))) - label * z;
}

std::vector<double> InnerAlgorithm(InnerMode mode, const Model& model,
                                   const Dataset& data,
                                   const std::vector<int64_t>& subset,
                                   double eta) {
  std::vector<double> acc(model.weights.size(), 0.0);
  switch (mode) {
    case InnerMode::kIcGrad:
      return Gradient(model, data.features[subset[0]],
                      data.labels[subset[0]]);
    case InnerMode::kBcMean:
      for (int64_t i : subset) {
        AddTo(acc, Gradient(model, data.features[i], data.labels[i]));
      }
      for (double& v : acc) v /= static_cast<double>(subset.size());
      return acc;
    case InnerMode::kSgdRecursion: {
      Model local = model;
      for (int64_t i : subset) {
        const std::vector<double> grad =
            Gradient(local, data.features[i], data.labels[i]);
        AddTo(acc, grad);
        AddTo(local.weights, grad, -eta);
      }
      return acc;
    }
  }
  return acc;
}

EpochMetrics Evaluate(const Model& model, const Dataset& data) {
  EpochMetrics out;
  const double n = static_cast<double>(data.size());
  double loss = 0.0;
  double correct = 0.0;
  double mean_label = 0.0;
  for (size_t i = 0; i < data.size(); ++i) mean_label += data.labels[i];
  mean_label /= n;
  double ss_res = 0.0;
  double ss_tot = 0.0;
  for (size_t i = 0; i < data.size(); ++i) {
    loss += Loss(model, data.features[i], data.labels[i]);
    const double z = Dot(model.weights, data.features[i]);
    if (model.loss == LossKind::kLogistic) {
      correct += ((z >= 0.0) == (data.labels[i] >= 0.5)) ? 1.0 : 0.0;
    } else {
      ss_res += (z - data.labels[i]) * (z - data.labels[i]);
      ss_tot += (data.labels[i] - mean_label) * (data.labels[i] - mean_label);
    }
  }
  out.loss = loss / n;
  if (model.loss == LossKind::kLogistic) {
    out.accuracy = correct / n;
  } else if (ss_tot > 0.0) {
    out.accuracy = 1.0 - ss_res / ss_tot;
  } else {
    out.accuracy = ss_res == 0.0 ? 1.0 : 0.0;
  }
  return out;
}

absl::Status ValidateTrainConfig(const TrainConfig& config) {
  RETURN_IF_ERROR(ValidateSamplerConfig(config.sampler));
  if (!(config.sigma >= 0.0)) {
    return absl::InvalidArgumentError("sigma should be nonnegative.");
  }
  if (!(config.clip_C > 0.0)) {
    return absl::InvalidArgumentError("clip_C should be positive.");
  }
  if (!(config.eta0 > 0.0)) {
    return absl::InvalidArgumentError("eta0 should be positive.");
  }
  if (!(config.lr_decay > 0.0 && config.lr_decay <= 1.0)) {
    return absl::InvalidArgumentError("lr_decay should be in (0,1].");
  }
  if (config.epochs < 0) {
    return absl::InvalidArgumentError("epochs should be nonnegative.");
  }
  if (config.inner == InnerMode::kIcGrad && config.sampler.s != 1) {
    return absl::InvalidArgumentError(
        "the per-example gradient inner mode requires s = 1.");
  }
  return absl::OkStatus();
}

Model InitialModel(const TrainConfig& config, size_t dim) {
  Model model;
  model.loss = config.loss;
  model.weights.assign(dim + 1, 0.0);
  return model;
}

RoundUpdate ComputeRound(const TrainConfig& config, const Model& model,
                         const Dataset& data, const Round& round,
                         Philox& noise) {
  RoundUpdate out;
  out.U.assign(model.weights.size(), 0.0);
  for (const std::vector<int64_t>& subset : round) {
    AddTo(out.U, Clip(InnerAlgorithm(config.inner, model, data, subset,
                                     config.inner_eta),
                      config.clip_C));
  }
  const double sd = (config.noise_scale == NoiseScale::kTwoC ? 2.0 : 1.0) *
                    config.clip_C * config.sigma;
  out.U_noised = out.U;
  if (sd > 0.0) {
    for (double& v : out.U_noised) v += sd * noise.NextNormal();
  }
  return out;
}

absl::StatusOr<TrainResult> Train(const TrainConfig& config,
                                  const Dataset& data, const Dataset* test) {
  RETURN_IF_ERROR(ValidateTrainConfig(config));
  if (static_cast<int64_t>(data.size()) != config.sampler.N) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "dataset has %d rows but N = %d.", data.size(), config.sampler.N));
  }
  TrainResult result;
  result.model = InitialModel(config, data.dim());
  Model& model = result.model;
  const double m = static_cast<double>(config.sampler.m);
  double eta = config.eta0;
  double previous_accuracy = -std::numeric_limits<double>::infinity();
  uint64_t global_round = 0;
  for (int64_t e = 0; e < EpochCount(config); ++e) {
    Philox sampler(config.seed, kSampleStream | static_cast<uint64_t>(e));
    const std::vector<Round> rounds = SampleEpoch(config.sampler, sampler);
    for (const Round& round : rounds) {
      Philox noise(config.seed, kNoiseStream | global_round);
      const RoundUpdate update = ComputeRound(config, model, data, round, noise);
      for (size_t i = 0; i < model.weights.size(); ++i) {
        model.weights[i] -= eta * update.U_noised[i] / m;
        if (!std::isfinite(model.weights[i])) {
          return absl::InternalError(absl::StrFormat(
              "weight %d became non-finite in epoch %d, round %d (eta = %g).",
              i, e + 1, global_round, eta));
        }
      }
      ++global_round;
    }
    EpochMetrics metrics = Evaluate(model, test != nullptr ? *test : data);
    metrics.epoch = e + 1;
    metrics.eta = eta;
    if (!std::isfinite(metrics.loss)) {
      return absl::InternalError(absl::StrFormat(
          "loss became non-finite after epoch %d (eta = %g).", e + 1, eta));
    }
    result.metrics.push_back(metrics);
    if (metrics.accuracy < previous_accuracy) eta *= config.lr_decay;
    previous_accuracy = metrics.accuracy;
  }
  return result;
}

absl::StatusOr<PairedUpdate> PairedRoundUpdate(const TrainConfig& config,
                                               const Model& model,
                                               const Dataset& d,
                                               const Dataset& d_prime,
                                               uint64_t shared_seed,
                                               int64_t round) {
  RETURN_IF_ERROR(ValidateTrainConfig(config));
  if (d.size() != d_prime.size() || d.dim() != d_prime.dim() ||
      static_cast<int64_t>(d.size()) != config.sampler.N) {
    return absl::InvalidArgumentError(
        "paired datasets should both have N rows of equal width.");
  }
  if (round < 0) return absl::InvalidArgumentError("round should be >= 0.");
  const int64_t per_epoch = RoundsPerEpoch(config.sampler);
  Philox sampler(shared_seed,
                 kSampleStream | static_cast<uint64_t>(round / per_epoch));
  const std::vector<Round> rounds = SampleEpoch(config.sampler, sampler);
  const Round& chosen = rounds[round % per_epoch];
  PairedUpdate out;
  out.U.assign(model.weights.size(), 0.0);
  out.U_prime.assign(model.weights.size(), 0.0);
  for (const std::vector<int64_t>& subset : chosen) {
    bool touched = false;
    for (int64_t i : subset) touched = touched || RowsDiffer(d, d_prime, i);
    const std::vector<double> a = Clip(
        InnerAlgorithm(config.inner, model, d, subset, config.inner_eta),
        config.clip_C);
    AddTo(out.U, a);
    if (touched) {
      ++out.k;
      AddTo(out.U_prime, Clip(InnerAlgorithm(config.inner, model, d_prime,
                                             subset, config.inner_eta),
                              config.clip_C));
    } else {
      AddTo(out.U_prime, a);
    }
  }
  return out;
}

}  // namespace fdp
