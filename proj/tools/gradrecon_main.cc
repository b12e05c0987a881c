// Copyright 2026 The gradrecon Authors
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

// Command-line front end: simulate, reconstruct, verify, sweep.
//
// Exit codes: 0 pass, 2 verdict fail, 1 error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "gradrecon/errors.h"
#include "gradrecon/harness.h"
#include "gradrecon/reconstruct.h"
#include "gradrecon/serialization.h"
#include "gradrecon/trajectory.h"
#include "json.hpp"

namespace {

namespace fs = std::filesystem;
using gradrecon::ExperimentConfig;

constexpr int kExitPass = 0;
constexpr int kExitError = 1;
constexpr int kExitFail = 2;

struct CommonFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  bool expose_steps = false;
  std::optional<double> tolerance;
};

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void WriteFile(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

ExperimentConfig LoadConfig(const CommonFlags& flags) {
  ExperimentConfig config = flags.config_path.empty()
                                ? gradrecon::ConfigFromJson("{}")
                                : gradrecon::ConfigFromJson(ReadFile(flags.config_path));
  if (flags.seed) config.seed = *flags.seed;
  if (flags.tolerance) config.tolerances.residual = *flags.tolerance;
  if (flags.expose_steps) config.expose_steps = true;
  return config;
}

void AddCommonFlags(CLI::App* app, CommonFlags& flags, bool config_required) {
  auto* config = app->add_option("--config", flags.config_path,
                                 "experiment config (JSON)");
  if (config_required) config->required();
  config->check(CLI::ExistingFile);
  app->add_option("--seed", flags.seed, "root seed (overrides config)");
  app->add_option("--out", flags.out_dir, "output directory");
  app->add_flag("--expose-steps", flags.expose_steps,
                "include hidden step sizes in trace sidecars");
  app->add_option("--tolerance", flags.tolerance,
                  "residual tolerance (overrides config)");
}

int RunSimulate(const CommonFlags& flags) {
  const ExperimentConfig config = LoadConfig(flags);
  const fs::path out = flags.out_dir.empty() ? fs::path("out") : fs::path(flags.out_dir);
  for (const fs::path& p : gradrecon::Simulate(config, out)) {
    std::cout << p.string() << "\n";
  }
  return kExitPass;
}

int RunReconstruct(const CommonFlags& flags, const std::string& measurements,
                   const std::string& constraints,
                   std::optional<double> known_lambda) {
  const ExperimentConfig config = LoadConfig(flags);
  std::ifstream in(measurements, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + measurements);
  const gradrecon::MeasurementSet ms = gradrecon::ReadMeasurementsCsv(in);

  gradrecon::MembershipParams params;
  if (const auto* d = std::get_if<gradrecon::DiminishingStep>(&config.policy.variant())) {
    params.delta = d->delta;
  }
  params.step_values = config.policy.finite_values();
  if (params.step_values.empty()) params.step_values = {1.0};
  if (!constraints.empty()) {
    params.constraints = gradrecon::ConstraintsFromJson(ReadFile(constraints));
  }
  params.known_lambda = known_lambda;
  params.enumerate = config.enumerate;
  if ((config.mode == gradrecon::Mode::kConstrained ||
       (config.mode == gradrecon::Mode::kAgentDependent && config.barrier)) &&
      !params.constraints) {
    throw gradrecon::InvalidArgumentError(
        "mode needs the public constraint set; pass --constraints");
  }
  const gradrecon::MembershipSummary summary = gradrecon::SummarizeMembership(
      ms, config.mode, params, config.reconstruct_options());

  nlohmann::json report = nlohmann::json::parse(gradrecon::ResultToJson(summary.result));
  report["mode"] = std::string(gradrecon::ModeName(config.mode));
  report["measurement_count"] = ms.size();
  report["required_k"] =
      summary.required_k ? nlohmann::json(*summary.required_k) : nlohmann::json(nullptr);
  report["within_hypotheses"] = summary.within_hypotheses;
  const std::string text = report.dump(2) + "\n";
  if (flags.out_dir.empty()) {
    std::cout << text;
  } else {
    WriteFile(fs::path(flags.out_dir) / "reconstruction.json", text);
  }
  const bool identified = summary.status == gradrecon::Status::kUnique ||
                          summary.status == gradrecon::Status::kUniqueUpToScale;
  return identified ? kExitPass : kExitFail;
}

int RunVerify(const CommonFlags& flags, const std::string& theorem_name) {
  const ExperimentConfig config = LoadConfig(flags);
  const gradrecon::Theorem theorem = gradrecon::ParseTheorem(theorem_name);
  const gradrecon::VerificationReport report = gradrecon::VerifyTheorem(theorem, config);
  if (flags.out_dir.empty()) {
    std::cout << report.ToJson();
  } else {
    const fs::path out(flags.out_dir);
    WriteFile(out / ("report_" + report.theorem + ".json"), report.ToJson());
    nlohmann::json timing;
    timing["theorem"] = report.theorem;
    timing["config_hash"] = report.config_hash;
    timing["wall_seconds"] = report.wall_seconds;
    timing["trials"] = report.trials.size();
    WriteFile(out / ("timing_" + report.theorem + ".json"), timing.dump(2) + "\n");
  }
  std::cerr << report.theorem << ": " << (report.passed ? "pass" : "fail")
            << " (pass_rate " << report.pass_rate << ", "
            << report.wall_seconds << " s)\n";
  return report.passed ? kExitPass : kExitFail;
}

int RunSweep(const CommonFlags& flags) {
  const ExperimentConfig config = LoadConfig(flags);
  const std::string csv = gradrecon::SweepCsv(config);
  if (flags.out_dir.empty()) {
    std::cout << csv;
  } else {
    WriteFile(fs::path(flags.out_dir) / "sweep.csv", csv);
  }
  return kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gradrecon: gradient-trajectory simulation and objective reconstruction"};
  app.set_version_flag("--version", std::string(gradrecon::ToolVersion()));
  app.require_subcommand(1);

  CommonFlags simulate_flags, reconstruct_flags, verify_flags, sweep_flags;
  auto* simulate = app.add_subcommand("simulate", "write trace and measurement files");
  AddCommonFlags(simulate, simulate_flags, true);

  auto* reconstruct =
      app.add_subcommand("reconstruct", "estimate the objective from a measurement CSV");
  AddCommonFlags(reconstruct, reconstruct_flags, false);
  std::string measurements, constraints;
  std::optional<double> known_lambda;
  reconstruct->add_option("--measurements", measurements, "measurement CSV")
      ->required()
      ->check(CLI::ExistingFile);
  reconstruct->add_option("--constraints", constraints, "constraint set JSON {C, d}")
      ->check(CLI::ExistingFile);
  reconstruct->add_option("--known-lambda", known_lambda, "barrier weight, if public");

  auto* verify = app.add_subcommand("verify", "run a Monte Carlo verification suite");
  AddCommonFlags(verify, verify_flags, true);
  std::string theorem;
  verify->add_option("--theorem", theorem, "T1..T5, A-convergence, L1, L2, L4")
      ->required();

  auto* sweep = app.add_subcommand("sweep", "success rate against measurement count");
  AddCommonFlags(sweep, sweep_flags, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitError;
  }

  try {
    if (*simulate) return RunSimulate(simulate_flags);
    if (*reconstruct) {
      return RunReconstruct(reconstruct_flags, measurements, constraints, known_lambda);
    }
    if (*verify) return RunVerify(verify_flags, theorem);
    if (*sweep) return RunSweep(sweep_flags);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
