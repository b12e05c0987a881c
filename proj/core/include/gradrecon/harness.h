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

#ifndef GRADRECON_HARNESS_H_
#define GRADRECON_HARNESS_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gradrecon/qp.h"
#include "gradrecon/reconstruct.h"
#include "gradrecon/step_policy.h"
#include "gradrecon/trajectory.h"

namespace gradrecon {

std::string_view ToolVersion();

enum class Theorem {
  kT1,           // constant step: unique after the threshold
  kT2,           // finite random steps: unique after the threshold
  kT3,           // agent-dependent steps: never unique
  kT4,           // log barrier with finite random steps
  kT5,           // log barrier with agent-dependent steps
  kConvergence,  // Wolfe-bound step ranges converge
  kL1,           // iterate independence, constant step
  kL2,           // iterate independence, finite random steps
  kL4,           // iterate independence, barrier dynamics
};

std::string_view TheoremName(Theorem theorem);
Theorem ParseTheorem(std::string_view name);

struct Tolerances {
  double residual = 1e-8;
  double rank_multiplier = 64.0;
  // Scale-normalized parameter error for a count to count as recovered.
  double success = 1e-6;
  double snap = 1e-6;
  // |x[K] - x*| <= convergence * (1 + |x*|).
  double convergence = 1e-6;
};

struct ExperimentConfig {
  Mode mode = Mode::kConstant;
  int n = 3;
  // Number of random half-spaces in constrained runs.
  int m = 2;
  double spectrum_lo = 1.0;
  double spectrum_hi = 10.0;
  StepSizePolicy policy = StepSizePolicy::Constant(0.1);
  // Iterations per trace; 0 means "just enough for count_hi measurements".
  int horizon = 0;
  int count_lo = 1;
  int count_hi = 5;
  int count_step = 1;
  int trials = 10;
  std::uint64_t seed = 1;
  Tolerances tolerances;
  // Barrier weights are drawn uniform on [0.1, 1] * lambda_max.
  double lambda_max = 1.0;
  double box_radius = 10.0;
  // Agent-dependent mode: run the log-barrier dynamics.
  bool barrier = false;
  // Finite mode: use the enumeration estimator.
  bool enumerate = false;
  std::uint64_t enumeration_budget = 1'000'000;
  double eps1 = 0.25;
  double eps2 = 0.5;
  int convergence_horizon = 10'000;
  bool expose_steps = false;

  ReconstructOptions reconstruct_options() const;
  std::vector<int> counts() const;
};

// Parses the experiment document (see schema/experiment_config.schema.json).
// Unknown keys are rejected.
ExperimentConfig ConfigFromJson(std::string_view text);
std::string ConfigToJson(const ExperimentConfig& config);
// FNV-1a 64 of ConfigToJson, as 16 hex digits.
std::string ConfigHash(const ExperimentConfig& config);

struct TrialData {
  ProblemInstance instance;
  Trace trace;
  // Initial points redrawn because the barrier trajectory left the domain.
  int redraws = 0;
};

// Deterministic in (config.seed, trial). Throws InfeasiblePointError if 100
// initial points in a row give infeasible barrier trajectories.
TrialData GenerateTrial(const ExperimentConfig& config, std::uint64_t trial,
                        int horizon);

// What the eavesdropper is allowed to know for this mode.
MembershipParams PublicParams(const ExperimentConfig& config,
                              const ProblemInstance& instance);

struct CountOutcome {
  int count = 0;
  Status status = Status::kInconsistent;
  int nullspace_dim = 0;
  double error = 0.0;
  bool success = false;
};

struct TrialRecord {
  std::uint64_t trial = 0;
  int redraws = 0;
  std::vector<CountOutcome> outcomes;
  // Rank and convergence checks.
  std::optional<bool> holds;
  std::optional<double> metric;
  std::optional<bool> contrast_failed;
};

struct CountSummary {
  int count = 0;
  int successes = 0;
  int trials = 0;
};

struct VerificationReport {
  std::string theorem;
  std::string config_hash;
  std::string config_json;
  Tolerances tolerances;
  std::optional<int> required_k;
  std::optional<int> threshold_count;
  std::optional<int> observed_transition_count;
  std::optional<int> expected_nullspace_dim;
  std::vector<CountSummary> per_count;
  std::vector<TrialRecord> trials;
  double pass_rate = 0.0;
  std::optional<double> contrast_failure_rate;
  bool passed = false;
  std::string notes;
  // Not serialized: keeps ToJson byte-identical across runs.
  double wall_seconds = 0.0;

  std::string ToJson() const;
};

// Per-trial outcomes for every measurement count in config.counts().
std::vector<TrialRecord> EvaluateCounts(const ExperimentConfig& config);

// CSV "count,trials,successes,success_rate".
std::string SweepCsv(const ExperimentConfig& config);

// Throws InvalidArgumentError when the config violates the theorem's
// hypotheses (dimension, mode, policy).
VerificationReport VerifyTheorem(Theorem theorem,
                                 const ExperimentConfig& config);

// Writes trace_NNNN.csv, trace_NNNN.json and measurements_NNNN.csv per trial
// and returns the paths written.
std::vector<std::filesystem::path> Simulate(
    const ExperimentConfig& config, const std::filesystem::path& out_dir);

}  // namespace gradrecon

#endif  // GRADRECON_HARNESS_H_
