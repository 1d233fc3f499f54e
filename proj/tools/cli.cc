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

#include "cli.h"

#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "absl/status/status.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_format.h"
#include "fdp/dataset.h"
#include "fdp/guarantee.h"
#include "fdp/oracle.h"
#include "fdp/rng.h"
#include "fdp/sampling.h"
#include "fdp/serialization.h"
#include "fdp/trainer.h"

namespace fdp {
namespace {

int ExitCodeFor(const absl::Status& status) {
  switch (status.code()) {
    case absl::StatusCode::kOk:
      return kExitOk;
    case absl::StatusCode::kInvalidArgument:
    case absl::StatusCode::kNotFound:
    case absl::StatusCode::kOutOfRange:
    case absl::StatusCode::kFailedPrecondition:
    case absl::StatusCode::kUnimplemented:
      return kExitValidation;
    default:
      return kExitNumerical;
  }
}

int Fail(const absl::Status& status, std::ostream& err) {
  err << "error: " << status.message() << "\n";
  return ExitCodeFor(status);
}

std::optional<uint64_t> SeedFromEnv() {
  const char* value = std::getenv("FDP_SEED");
  uint64_t seed;
  if (value != nullptr && absl::SimpleAtoi(value, &seed)) return seed;
  return std::nullopt;
}

struct SamplerFlags {
  std::string strategy = "sh";
  std::string clipping = "bc";
  int64_t N = 1;
  int64_t s = 1;
  int64_t m = 1;
  int64_t E = 1;
  int64_t g = 1;

  void Register(CLI::App* app) {
    app->add_option("--strategy", strategy, "ss or sh")
        ->check(CLI::IsMember({"ss", "sh"}));
    app->add_option("--clipping", clipping, "ic, bc or gen")
        ->check(CLI::IsMember({"ic", "bc", "gen"}));
    app->add_option("--N", N, "data set size");
    app->add_option("--s", s, "subset size");
    app->add_option("--m", m, "subsets per round");
    app->add_option("--E", E, "epochs");
    app->add_option("--g", g, "group size");
  }

  absl::StatusOr<SamplerConfig> Build() const {
    SamplerConfig c;
    c.N = N;
    c.s = s;
    c.m = m;
    c.E = E;
    c.g = g;
    auto st = ParseStrategy(strategy);
    if (!st.ok()) return st.status();
    auto cl = ParseClipping(clipping);
    if (!cl.ok()) return cl.status();
    c.strategy = *st;
    c.clipping = *cl;
    absl::Status valid = ValidateSamplerConfig(c);
    if (!valid.ok()) return valid;
    return c;
  }
};

int RunAccount(const SamplerFlags& flags, double sigma, double gamma,
               double omega, const std::string& format, int points,
               std::ostream& out, std::ostream& err) {
  absl::StatusOr<SamplerConfig> config = flags.Build();
  if (!config.ok()) return Fail(config.status(), err);
  GuaranteeOptions options;
  options.gamma = gamma;
  options.omega = omega;
  absl::StatusOr<GuaranteeBundle> bundle = Analyze(*config, sigma, options);
  if (!bundle.ok()) return Fail(bundle.status(), err);
  if (format == "csv") {
    out << BundleToCsv(*bundle, UniformAlphaGrid(points));
  } else {
    out << BundleToJson(*bundle).dump(2) << "\n";
  }
  return kExitOk;
}

int RunQdist(const SamplerFlags& flags, double eps_trunc, bool occupancy,
             int64_t mc_trials, uint64_t seed, const std::string& format,
             std::ostream& out, std::ostream& err) {
  absl::StatusOr<SamplerConfig> config = flags.Build();
  if (!config.ok()) return Fail(config.status(), err);
  CVecDist dist;
  if (mc_trials > 0) {
    absl::StatusOr<EmpiricalDist> emp =
        EmpiricalQDist(*config, mc_trials, seed, DefaultWorkerCount());
    if (!emp.ok()) return Fail(emp.status(), err);
    dist.entries = emp->freq;
  } else if (occupancy && config->strategy == Strategy::kSH &&
             config->clipping == Clipping::kBC) {
    absl::StatusOr<RoundKDist> q =
        QdistBcShufflingOccupancy(config->N, config->s, config->g);
    if (!q.ok()) return Fail(q.status(), err);
    CVecDist epoch;
    for (size_t j = 1; j < q->probs.size(); ++j) {
      if (q->probs[j] > 0.0) epoch.entries[static_cast<int64_t>(j)] = q->probs[j];
    }
    absl::StatusOr<CVecDist> run = EpochConvolve(epoch, config->E, eps_trunc);
    if (!run.ok()) return Fail(run.status(), err);
    dist = *run;
  } else {
    absl::StatusOr<CVecDist> run = RunCDist(*config, eps_trunc);
    if (!run.ok()) return Fail(run.status(), err);
    dist = *run;
  }
  if (format == "json") {
    out << CVecDistToJson(dist).dump(2) << "\n";
  } else {
    out << CVecDistToCsv(dist);
  }
  if (dist.truncated_mass > 0.0) {
    err << "truncated mass: " << FormatDouble(dist.truncated_mass) << "\n";
  }
  return kExitOk;
}

absl::StatusOr<Dataset> LoadTrainingData(const Json& json,
                                         const std::string& key) {
  if (!json.contains(key)) {
    return absl::NotFoundError(absl::StrFormat("config has no '%s'.", key));
  }
  return LoadCsv(json.at(key).get<std::string>());
}

absl::StatusOr<Dataset> SyntheticData(const Json& spec) {
  try {
    const std::string kind = spec.at("kind").get<std::string>();
    const int64_t n = spec.value("n", int64_t{1000});
    if (kind == "blobs") {
      return MakeBlobs(n, spec.value("margin", 2.0),
                       spec.value("seed", uint64_t{7}));
    }
    if (kind == "linear") {
      return MakeLinearData(n, spec.value("slope", 1.0),
                            spec.value("intercept", 0.0));
    }
    return absl::InvalidArgumentError(
        absl::StrFormat("unknown synthetic kind '%s'.", kind));
  } catch (const std::exception& e) {
    return absl::InvalidArgumentError(
        absl::StrFormat("malformed synthetic block: %s", e.what()));
  }
}

int RunTrain(const std::string& config_path, std::optional<double> sigma,
             std::optional<double> clip_C, std::optional<int64_t> epochs,
             std::optional<uint64_t> seed, const std::string& metrics_out,
             const std::string& model_out, std::ostream& out,
             std::ostream& err) {
  std::ifstream file(config_path);
  if (!file) {
    return Fail(absl::NotFoundError(absl::StrFormat(
                    "config file '%s' not found.", config_path)),
                err);
  }
  Json json;
  try {
    json = Json::parse(file);
  } catch (const std::exception& e) {
    return Fail(absl::InvalidArgumentError(
                    absl::StrFormat("cannot parse '%s': %s", config_path,
                                    e.what())),
                err);
  }
  absl::StatusOr<TrainConfig> config = TrainConfigFromJson(json);
  if (!config.ok()) return Fail(config.status(), err);
  absl::StatusOr<Dataset> data =
      json.contains("synthetic") ? SyntheticData(json.at("synthetic"))
                                 : LoadTrainingData(json, "data");
  if (!data.ok()) return Fail(data.status(), err);
  std::optional<Dataset> test;
  if (json.contains("test_data")) {
    absl::StatusOr<Dataset> t = LoadTrainingData(json, "test_data");
    if (!t.ok()) return Fail(t.status(), err);
    test = std::move(*t);
  }
  if (!json.contains("N")) config->sampler.N = data->size();
  if (sigma) config->sigma = *sigma;
  if (clip_C) config->clip_C = *clip_C;
  if (epochs) config->epochs = *epochs;
  if (seed) config->seed = *seed;
  if (std::optional<uint64_t> env = SeedFromEnv()) config->seed = *env;
  absl::StatusOr<TrainResult> result =
      Train(*config, *data, test ? &*test : nullptr);
  if (!result.ok()) return Fail(result.status(), err);
  const std::string metrics = MetricsToCsv(result->metrics);
  const std::string model = ModelToJson(result->model).dump(2) + "\n";
  if (!metrics_out.empty()) {
    std::ofstream(metrics_out) << metrics;
  } else {
    out << metrics;
  }
  if (!model_out.empty()) {
    std::ofstream(model_out) << model;
  } else {
    out << "\n" << model;
  }
  err << "seed: " << config->seed << "\n";
  return kExitOk;
}

int RunVerify(int64_t trials, int workers, uint64_t seed, std::ostream& out,
              std::ostream& err) {
  if (trials < 1000) {
    return Fail(absl::InvalidArgumentError("trials should be >= 1000."), err);
  }
  VerifyOptions options;
  options.trials = trials;
  options.workers = workers > 0 ? workers : DefaultWorkerCount();
  options.seed = SeedFromEnv().value_or(seed);
  const std::vector<OracleCheck> checks = RunOracleMatrix(options);
  const Json report = OracleReportToJson(checks);
  out << report.dump(2) << "\n";
  return report["all_passed"].get<bool>() ? kExitOk : kExitNumerical;
}

int RunCompareGroup(const SamplerFlags& flags, double sigma, int points,
                    std::ostream& out, std::ostream& err) {
  absl::StatusOr<SamplerConfig> config = flags.Build();
  if (!config.ok()) return Fail(config.status(), err);
  GuaranteeOptions options;
  options.alphas = UniformAlphaGrid(points);
  absl::StatusOr<GroupComparison> cmp =
      CompareGroupPaths(*config, sigma, options);
  if (!cmp.ok()) return Fail(cmp.status(), err);
  out << GroupComparisonToCsv(*cmp);
  err << "direct mu " << FormatDouble(cmp->direct_mu) << ", iterated mu "
      << FormatDouble(cmp->iterated_mu) << ", direct dominates: "
      << (cmp->direct_dominates ? "yes" : "no") << "\n";
  return kExitOk;
}

}  // namespace

int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err) {
  CLI::App app{"Trade-off accounting for generalized DP-SGD", "fdp"};
  app.require_subcommand(1);

  SamplerFlags sampler;
  double sigma = 1.0;
  double gamma = 0.0;
  double omega = 2.0;
  std::string format = "json";
  bool csv = false;
  int points = 101;
  double eps_trunc = kDefaultTruncation;

  CLI::App* account = app.add_subcommand("account", "guarantee bundle");
  sampler.Register(account);
  account->add_option("--sigma", sigma, "noise multiplier");
  account->add_option("--gamma", gamma, "tail exponent (default 1/g)");
  account->add_option("--omega", omega, "Renyi order");
  account->add_option("--format", format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}));
  account->add_flag("--csv", csv, "same as --format csv");
  account->add_option("--points", points, "CSV rows on a uniform alpha grid")
      ->check(CLI::Range(2, 1000001));

  SamplerFlags qsampler;
  std::string qformat = "csv";
  bool occupancy = false;
  int64_t mc_trials = 0;
  uint64_t qseed = kPrimarySeed;
  CLI::App* qdist = app.add_subcommand("qdist", "distribution of c^2");
  qsampler.Register(qdist);
  qdist->add_option("--format", qformat, "csv or json")
      ->check(CLI::IsMember({"json", "csv"}));
  qdist->add_option("--trunc", eps_trunc, "pruning budget");
  qdist->add_flag("--occupancy", occupancy,
                  "batch shuffling: use the permutation occupancy law");
  qdist->add_option("--mc-trials", mc_trials, "simulate instead");
  qdist->add_option("--seed", qseed, "simulation seed");

  std::string config_path;
  std::optional<double> train_sigma;
  std::optional<double> train_C;
  std::optional<int64_t> train_epochs;
  std::optional<uint64_t> train_seed;
  std::string metrics_out;
  std::string model_out;
  CLI::App* train = app.add_subcommand("train", "run DP-SGD");
  train->add_option("--config", config_path, "JSON config")->required();
  train->add_option("--sigma", train_sigma, "override sigma");
  train->add_option("--C", train_C, "override clipping norm");
  train->add_option("--epochs", train_epochs, "override epochs");
  train->add_option("--seed", train_seed, "override seed");
  train->add_option("--metrics-out", metrics_out, "metrics CSV path");
  train->add_option("--model-out", model_out, "model JSON path");

  int64_t trials = 100000;
  int workers = 0;
  uint64_t vseed = kPrimarySeed;
  CLI::App* verify = app.add_subcommand("verify", "run the oracle matrix");
  verify->add_option("--trials", trials, "Monte Carlo trials");
  verify->add_option("--workers", workers, "threads (0 = auto)");
  verify->add_option("--seed", vseed, "base seed");

  SamplerFlags gsampler;
  double gsigma = 1.0;
  int gpoints = 101;
  CLI::App* compare =
      app.add_subcommand("compare-group", "direct vs iterated group curves");
  gsampler.Register(compare);
  compare->add_option("--sigma", gsigma, "noise multiplier");
  compare->add_option("--points", gpoints, "uniform alpha grid size")
      ->check(CLI::Range(2, 1000001));

  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    CLI::App* failed = &app;
    for (CLI::App* sub : app.get_subcommands()) failed = sub;
    err << failed->help();
    return kExitValidation;
  }

  if (account->parsed()) {
    return RunAccount(sampler, sigma, gamma, omega, csv ? "csv" : format,
                      points, out, err);
  }
  if (qdist->parsed()) {
    const uint64_t seed = SeedFromEnv().value_or(qseed);
    return RunQdist(qsampler, eps_trunc, occupancy, mc_trials, seed, qformat,
                    out, err);
  }
  if (train->parsed()) {
    return RunTrain(config_path, train_sigma, train_C, train_epochs,
                    train_seed, metrics_out, model_out, out, err);
  }
  if (verify->parsed()) return RunVerify(trials, workers, vseed, out, err);
  if (compare->parsed()) {
    return RunCompareGroup(gsampler, gsigma, gpoints, out, err);
  }
  err << app.help();
  return kExitValidation;
}

}  // namespace fdp
