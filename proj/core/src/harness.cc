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

#include "gradrecon/harness.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "gradrecon/errors.h"
#include "gradrecon/linear_system.h"
#include "gradrecon/rng.h"
#include "gradrecon/serialization.h"
#include "json_util.h"
#include "parallel.h"

#ifndef GRADRECON_VERSION
#define GRADRECON_VERSION "0.0.0"
#endif

namespace gradrecon {
namespace {

using internal::Json;

constexpr int kMaxInitialPointRedraws = 100;
constexpr double kIndependencePassRate = 0.99;
constexpr double kContrastFailureRate = 0.9;

bool UsesBarrier(const ExperimentConfig& config) {
  return config.mode == Mode::kConstrained ||
         (config.mode == Mode::kAgentDependent && config.barrier);
}

StepSizePolicy DefaultPolicy(Mode mode) {
  switch (mode) {
    case Mode::kConstant:
      return StepSizePolicy::Constant(0.1);
    case Mode::kDiminishing:
      return StepSizePolicy::Diminishing(0.1, 1.0);
    case Mode::kFinite:
    case Mode::kConstrained:
      return StepSizePolicy::UniformFinite({0.05, 0.1});
    case Mode::kAgentDependent:
      return StepSizePolicy::AgentDependent({0.05, 0.1});
  }
  return StepSizePolicy::Constant(0.1);
}

void CheckPolicyMatchesMode(const ExperimentConfig& config) {
  const std::string_view type = config.policy.type_name();
  const bool ok = [&] {
    switch (config.mode) {
      case Mode::kConstant:
        return type == "constant";
      case Mode::kDiminishing:
        return type == "diminishing";
      case Mode::kFinite:
      case Mode::kConstrained:
        return type == "uniform_finite";
      case Mode::kAgentDependent:
        return type == "agent_dependent";
    }
    return false;
  }();
  if (!ok) {
    throw InvalidArgumentError("policy type " + std::string(type) +
                               " does not match mode " +
                               std::string(ModeName(config.mode)));
  }
}

void ValidateConfig(const ExperimentConfig& c) {
  if (c.n < 1) throw InvalidArgumentError("n must be >= 1");
  if (c.m < 1) throw InvalidArgumentError("m must be >= 1");
  if (c.trials < 1) throw InvalidArgumentError("trials must be >= 1");
  if (!(c.spectrum_lo > 0.0 && c.spectrum_hi > c.spectrum_lo)) {
    throw InvalidArgumentError("spectrum must satisfy 0 < lo < hi");
  }
  if (c.count_lo < 1 || c.count_hi < c.count_lo || c.count_step < 1) {
    throw InvalidArgumentError("measurement count range is empty");
  }
  if (c.horizon < 0) throw InvalidArgumentError("horizon must be >= 0");
  if (!(c.lambda_max > 0.0)) throw InvalidArgumentError("lambda_max must be positive");
  CheckPolicyMatchesMode(c);
}

ProblemInstance MakeInstance(const ExperimentConfig& config,
                             std::uint64_t trial) {
  Rng utility_rng(config.seed, trial, StreamDomain::kUtility);
  QuadraticUtility utility =
      SampleUtility(config.n, config.spectrum_lo, config.spectrum_hi, utility_rng);
  if (!UsesBarrier(config)) return ProblemInstance(std::move(utility));

  // Half-spaces through points halfway to the unconstrained optimum, so the
  // optimum is cut off and the barrier term stays active.
  const Vector optimum = Optimum(utility);
  Rng constraint_rng(config.seed, trial, StreamDomain::kConstraints);
  Matrix C(config.m, config.n);
  Vector d(config.m);
  for (int i = 0; i < config.m; ++i) {
    Vector row(config.n);
    for (int j = 0; j < config.n; ++j) row(j) = constraint_rng.Normal();
    row.normalize();
    if (row.dot(optimum) < 0.0) row = -row;
    C.row(i) = row.transpose();
    d(i) = 0.5 * row.dot(optimum);
  }
  Rng lambda_rng(config.seed, trial, StreamDomain::kBarrierWeight);
  const double lambda = config.lambda_max * (0.1 + 0.9 * lambda_rng.Uniform());
  return ProblemInstance(std::move(utility), ConstraintSet(std::move(C), std::move(d)),
                         lambda);
}

Trace RunFromSampledStart(const ExperimentConfig& config,
                          const ProblemInstance& instance,
                          const StepSizePolicy& policy, std::uint64_t trial,
                          int horizon, int* redraws) {
  Rng start_rng(config.seed, trial, StreamDomain::kInitialPoint);
  const CounterStream stream(config.seed, trial);
  InitialPointOptions options;
  options.box_radius = config.box_radius;
  std::string last_error;
  for (int attempt = 0; attempt <= kMaxInitialPointRedraws; ++attempt) {
    const Vector x0 = SampleInitialPoint(instance, start_rng, options);
    try {
      Trace trace = Run(instance, policy, x0, horizon, stream, config.seed, trial);
      if (redraws != nullptr) *redraws = attempt;
      return trace;
    } catch (const InfeasiblePointError& e) {
      if (!instance.constrained()) throw;
      last_error = e.what();
    }
  }
  throw InfeasiblePointError("trial " + std::to_string(trial) + ": " +
                             std::to_string(kMaxInitialPointRedraws) +
                             " initial points gave infeasible trajectories; last: " +
                             last_error);
}

ReconstructionResult Estimate(const ExperimentConfig& config,
                              const MeasurementSet& ms,
                              const MembershipParams& params) {
  const ReconstructOptions options = config.reconstruct_options();
  if (config.mode == Mode::kFinite && !config.enumerate && ms.size() < 2) {
    // Below the nullspace estimator's minimum: report the structural count.
    ReconstructionResult r;
    const NullspaceAnalysis a = AnalyzeNullspace(
        AssembleHomogeneous(ms, nullptr, false).coefficients,
        options.rank_multiplier, false);
    r.nullspace_dim = a.nullity;
    r.status = a.nullity >= 2 ? Status::kUnderdetermined : Status::kInconsistent;
    return r;
  }
  return SummarizeMembership(ms, config.mode, params, options).result;
}

std::optional<int> ExpectedAgentNullity(const ExperimentConfig& config) {
  if (config.mode != Mode::kAgentDependent) return std::nullopt;
  return config.n * (config.n + 3) / 2 + (config.barrier ? 1 : 0);
}

std::vector<CountSummary> Summarize(const ExperimentConfig& config,
                                    const std::vector<TrialRecord>& records) {
  std::vector<CountSummary> rows;
  const std::vector<int> counts = config.counts();
  for (std::size_t c = 0; c < counts.size(); ++c) {
    CountSummary row{counts[c], 0, static_cast<int>(records.size())};
    for (const TrialRecord& r : records) row.successes += r.outcomes[c].success ? 1 : 0;
    rows.push_back(row);
  }
  return rows;
}

std::optional<int> ObservedTransition(const std::vector<CountSummary>& rows) {
  std::optional<int> transition;
  for (auto it = rows.rbegin(); it != rows.rend(); ++it) {
    if (it->successes != it->trials) break;
    transition = it->count;
  }
  return transition;
}

Json TolerancesJson(const Tolerances& t) {
  Json j;
  j["residual"] = t.residual;
  j["rank_multiplier"] = t.rank_multiplier;
  j["success"] = t.success;
  j["snap"] = t.snap;
  j["convergence"] = t.convergence;
  return j;
}

template <class T>
Json OptionalJson(const std::optional<T>& v) {
  return v ? Json(*v) : Json(nullptr);
}

std::vector<TrialRecord> RunTrials(
    const ExperimentConfig& config,
    const std::function<void(std::uint64_t, TrialRecord&)>& body) {
  std::vector<TrialRecord> records(config.trials);
  const std::size_t chunks = internal::WorkerCount(records.size(), 1);
  internal::ParallelChunks(records.size(), chunks,
                           [&](std::size_t, std::size_t begin, std::size_t end) {
                             for (std::size_t t = begin; t < end; ++t) {
                               records[t].trial = t;
                               body(t, records[t]);
                             }
                           });
  return records;
}

VerificationReport ThresholdReport(Theorem theorem, const ExperimentConfig& config) {
  VerificationReport report;
  report.trials = EvaluateCounts(config);
  report.per_count = Summarize(config, report.trials);
  report.required_k = RequiredK(config.mode, config.n);
  report.threshold_count = report.required_k;
  report.observed_transition_count = ObservedTransition(report.per_count);

  bool ok = true;
  int agreeing = 0;
  for (const TrialRecord& r : report.trials) {
    bool trial_ok = true;
    for (const CountOutcome& o : r.outcomes) {
      const bool expected = o.count >= *report.threshold_count;
      trial_ok = trial_ok && (o.success == expected);
    }
    agreeing += trial_ok ? 1 : 0;
    ok = ok && trial_ok;
  }
  report.pass_rate = static_cast<double>(agreeing) / report.trials.size();
  report.passed = ok;
  std::ostringstream notes;
  notes << "pass requires success exactly for counts >= "
        << *report.threshold_count << " in every trial";
  if (theorem == Theorem::kT4) notes << "; success includes lambda";
  report.notes = notes.str();
  return report;
}

VerificationReport ImpossibilityReport(const ExperimentConfig& config) {
  VerificationReport report;
  report.trials = EvaluateCounts(config);
  report.per_count = Summarize(config, report.trials);
  report.expected_nullspace_dim = ExpectedAgentNullity(config);
  int agreeing = 0;
  for (const TrialRecord& r : report.trials) {
    bool trial_ok = true;
    for (const CountOutcome& o : r.outcomes) {
      trial_ok = trial_ok && o.status == Status::kUnderdetermined &&
                 o.nullspace_dim == *report.expected_nullspace_dim;
    }
    agreeing += trial_ok ? 1 : 0;
  }
  report.pass_rate = static_cast<double>(agreeing) / report.trials.size();
  report.passed = agreeing == static_cast<int>(report.trials.size());
  report.notes = "pass requires Underdetermined with nullspace_dim == " +
                 std::to_string(*report.expected_nullspace_dim) +
                 " at every count in every trial";
  return report;
}

VerificationReport IndependenceReport(const ExperimentConfig& config) {
  VerificationReport report;
  const int horizon = std::max(config.n, 1);
  report.trials = RunTrials(config, [&](std::uint64_t t, TrialRecord& rec) {
    const ProblemInstance instance = MakeInstance(config, t);
    const Trace trace =
        RunFromSampledStart(config, instance, config.policy, t, horizon, &rec.redraws);
    const RankReport rank = CheckIndependence(trace, config.n);
    rec.holds = rank.holds;
    rec.metric = rank.rank;
  });
  int holds = 0;
  for (const TrialRecord& r : report.trials) holds += *r.holds ? 1 : 0;
  report.pass_rate = static_cast<double>(holds) / report.trials.size();
  report.passed = report.pass_rate >= kIndependencePassRate;
  report.notes = "pass requires x[0..n-1] independent in >= 99% of trials";
  return report;
}

std::vector<double> DistinctValuesInside(Rng& rng, double lo, double hi, int count) {
  std::set<double> values;
  while (static_cast<int>(values.size()) < count) {
    values.insert(lo + (hi - lo) * (0.05 + 0.9 * rng.Uniform()));
  }
  return {values.begin(), values.end()};
}

VerificationReport ConvergenceReport(const ExperimentConfig& config) {
  VerificationReport report;
  const int values_per_trial =
      config.policy.agent_dependent()
          ? static_cast<int>(config.policy.finite_values().size())
          : 3;
  report.trials = RunTrials(config, [&](std::uint64_t t, TrialRecord& rec) {
    Rng utility_rng(config.seed, t, StreamDomain::kUtility);
    const QuadraticUtility utility =
        SampleUtility(config.n, config.spectrum_lo, config.spectrum_hi, utility_rng);
    const ProblemInstance instance(utility);
    const WolfeBounds bounds = ComputeWolfeBounds(utility.Q(), config.eps1, config.eps2);
    if (!(bounds.c1_min < bounds.c2_max)) {
      throw InvalidArgumentError(
          "trial " + std::to_string(t) +
          ": Wolfe interval (c1_min, c2_max) is empty; narrow the spectrum so "
          "that lambda_max/lambda_min < (2 - eps2)/(1 - eps2)");
    }
    Rng value_rng(config.seed, t, StreamDomain::kPolicyValues);
    const auto inside = StepSizePolicy::AgentDependent(DistinctValuesInside(
        value_rng, bounds.c1_min, bounds.c2_max, values_per_trial));
    const Vector eig = utility.Eigenvalues();
    const double divergence_bound = 2.0 / eig(0);
    const auto above = StepSizePolicy::AgentDependent(DistinctValuesInside(
        value_rng, 1.1 * divergence_bound, 1.5 * divergence_bound, values_per_trial));

    const Vector optimum = Optimum(utility);
    const double limit = config.tolerances.convergence * (1.0 + optimum.norm());
    const Trace trace = RunFromSampledStart(config, instance, inside, t,
                                            config.convergence_horizon, &rec.redraws);
    const double distance = (trace.iterates().back() - optimum).norm();
    rec.metric = distance;
    rec.holds = distance <= limit;
    try {
      const Trace contrast = RunFromSampledStart(config, instance, above, t,
                                                 config.convergence_horizon, nullptr);
      const double d = (contrast.iterates().back() - optimum).norm();
      rec.contrast_failed = !(d <= limit);
    } catch (const InfeasiblePointError&) {
      rec.contrast_failed = true;  // overflowed
    }
  });
  int converged = 0;
  int contrast_failed = 0;
  for (const TrialRecord& r : report.trials) {
    converged += *r.holds ? 1 : 0;
    contrast_failed += *r.contrast_failed ? 1 : 0;
  }
  const double n_trials = static_cast<double>(report.trials.size());
  report.pass_rate = converged / n_trials;
  report.contrast_failure_rate = contrast_failed / n_trials;
  report.passed = converged == static_cast<int>(report.trials.size()) &&
                  *report.contrast_failure_rate >= kContrastFailureRate;
  report.notes =
      "steps drawn inside (c1_min, c2_max) must converge in every trial; steps "
      "in [1.1, 1.5] * 2/lambda_min must fail in >= 90% of trials";
  return report;
}

}  // namespace

std::string_view ToolVersion() { return GRADRECON_VERSION; }

std::string_view TheoremName(Theorem theorem) {
  switch (theorem) {
    case Theorem::kT1: return "T1";
    case Theorem::kT2: return "T2";
    case Theorem::kT3: return "T3";
    case Theorem::kT4: return "T4";
    case Theorem::kT5: return "T5";
    case Theorem::kConvergence: return "A-convergence";
    case Theorem::kL1: return "L1";
    case Theorem::kL2: return "L2";
    case Theorem::kL4: return "L4";
  }
  return "T1";
}

Theorem ParseTheorem(std::string_view name) {
  for (Theorem t : {Theorem::kT1, Theorem::kT2, Theorem::kT3, Theorem::kT4,
                    Theorem::kT5, Theorem::kConvergence, Theorem::kL1,
                    Theorem::kL2, Theorem::kL4}) {
    if (TheoremName(t) == name) return t;
  }
  throw InvalidArgumentError("unknown theorem id: " + std::string(name));
}

ReconstructOptions ExperimentConfig::reconstruct_options() const {
  ReconstructOptions o;
  o.residual_tolerance = tolerances.residual;
  o.rank_multiplier = tolerances.rank_multiplier;
  o.snap_tolerance = tolerances.snap;
  o.dedup_tolerance = tolerances.success;
  o.enumeration_budget = enumeration_budget;
  return o;
}

std::vector<int> ExperimentConfig::counts() const {
  std::vector<int> out;
  for (int c = count_lo; c <= count_hi; c += count_step) out.push_back(c);
  if (out.back() != count_hi) out.push_back(count_hi);
  return out;
}

ExperimentConfig ConfigFromJson(std::string_view text) {
  static const std::set<std::string> kKeys = {
      "mode", "n", "m", "spectrum", "policy", "horizon", "measurements",
      "sweep", "trials", "seed", "tolerances", "lambda_max", "box_radius",
      "barrier", "enumerate", "enumeration_budget", "wolfe",
      "convergence_horizon", "expose_steps"};
  const Json j = internal::ParseJson(text);
  if (!j.is_object()) throw InvalidArgumentError("config must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!kKeys.count(it.key())) {
      throw InvalidArgumentError("unknown config key: " + it.key());
    }
  }
  ExperimentConfig c;
  try {
    if (j.contains("mode")) c.mode = ParseMode(j.at("mode").get<std::string>());
    c.n = j.value("n", c.n);
    c.m = j.value("m", c.m);
    if (j.contains("spectrum")) {
      const auto s = j.at("spectrum").get<std::vector<double>>();
      if (s.size() != 2) throw InvalidArgumentError("spectrum must be [lo, hi]");
      c.spectrum_lo = s[0];
      c.spectrum_hi = s[1];
    }
    c.policy = j.contains("policy") ? PolicyFromJson(j.at("policy").dump())
                                    : DefaultPolicy(c.mode);
    c.horizon = j.value("horizon", c.horizon);
    if (c.mode == Mode::kAgentDependent) {
      c.count_lo = 1;
      c.count_hi = 51;
      c.count_step = 10;
    } else {
      c.count_lo = 1;
      c.count_hi = c.n + 2;
    }
    if (j.contains("measurements") && j.contains("sweep")) {
      throw InvalidArgumentError("give either measurements or sweep, not both");
    }
    if (j.contains("measurements")) {
      c.count_lo = c.count_hi = j.at("measurements").get<int>();
      c.count_step = 1;
    }
    if (j.contains("sweep")) {
      const auto s = j.at("sweep").get<std::vector<int>>();
      if (s.size() != 2 && s.size() != 3) {
        throw InvalidArgumentError("sweep must be [lo, hi] or [lo, hi, step]");
      }
      c.count_lo = s[0];
      c.count_hi = s[1];
      c.count_step = s.size() == 3 ? s[2] : 1;
    }
    c.trials = j.value("trials", c.trials);
    c.seed = j.value("seed", c.seed);
    if (j.contains("tolerances")) {
      const Json& t = j.at("tolerances");
      c.tolerances.residual = t.value("residual", c.tolerances.residual);
      c.tolerances.rank_multiplier = t.value("rank_multiplier", c.tolerances.rank_multiplier);
      c.tolerances.success = t.value("success", c.tolerances.success);
      c.tolerances.snap = t.value("snap", c.tolerances.snap);
      c.tolerances.convergence = t.value("convergence", c.tolerances.convergence);
    }
    c.lambda_max = j.value("lambda_max", c.lambda_max);
    c.box_radius = j.value("box_radius", c.box_radius);
    c.barrier = j.value("barrier", c.barrier);
    c.enumerate = j.value("enumerate", c.enumerate);
    c.enumeration_budget = j.value("enumeration_budget", c.enumeration_budget);
    if (j.contains("wolfe")) {
      c.eps1 = j.at("wolfe").value("eps1", c.eps1);
      c.eps2 = j.at("wolfe").value("eps2", c.eps2);
    }
    c.convergence_horizon = j.value("convergence_horizon", c.convergence_horizon);
    c.expose_steps = j.value("expose_steps", c.expose_steps);
  } catch (const Json::exception& e) {
    throw InvalidArgumentError(std::string("bad config: ") + e.what());
  }
  ValidateConfig(c);
  return c;
}

std::string ConfigToJson(const ExperimentConfig& c) {
  Json j;
  j["mode"] = std::string(ModeName(c.mode));
  j["n"] = c.n;
  j["m"] = c.m;
  j["spectrum"] = {c.spectrum_lo, c.spectrum_hi};
  j["policy"] = internal::ParseJson(PolicyToJson(c.policy));
  j["horizon"] = c.horizon;
  j["sweep"] = {c.count_lo, c.count_hi, c.count_step};
  j["trials"] = c.trials;
  j["seed"] = c.seed;
  j["tolerances"] = TolerancesJson(c.tolerances);
  j["lambda_max"] = c.lambda_max;
  j["box_radius"] = c.box_radius;
  j["barrier"] = c.barrier;
  j["enumerate"] = c.enumerate;
  j["enumeration_budget"] = c.enumeration_budget;
  j["wolfe"] = {{"eps1", c.eps1}, {"eps2", c.eps2}};
  j["convergence_horizon"] = c.convergence_horizon;
  j["expose_steps"] = c.expose_steps;
  return internal::DumpJson(j);
}

std::string ConfigHash(const ExperimentConfig& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : ConfigToJson(config)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

TrialData GenerateTrial(const ExperimentConfig& config, std::uint64_t trial,
                        int horizon) {
  ProblemInstance instance = MakeInstance(config, trial);
  int redraws = 0;
  Trace trace = RunFromSampledStart(config, instance, config.policy, trial,
                                    horizon, &redraws);
  return TrialData{std::move(instance), std::move(trace), redraws};
}

MembershipParams PublicParams(const ExperimentConfig& config,
                              const ProblemInstance& instance) {
  MembershipParams params;
  if (const auto* d = std::get_if<DiminishingStep>(&config.policy.variant())) {
    params.delta = d->delta;
  }
  params.step_values = config.policy.finite_values();
  if (params.step_values.empty()) {
    // Scalar policies: the finite-step estimators are not used, but keep the
    // set well-formed.
    params.step_values = {1.0};
  }
  if (instance.constrained()) params.constraints = *instance.constraints();
  params.enumerate = config.enumerate;
  return params;
}

std::vector<TrialRecord> EvaluateCounts(const ExperimentConfig& config) {
  const std::vector<int> counts = config.counts();
  const int horizon = std::max(config.horizon, counts.back());
  return RunTrials(config, [&](std::uint64_t t, TrialRecord& rec) {
    const TrialData data = GenerateTrial(config, t, horizon);
    rec.redraws = data.redraws;
    const MeasurementSet ms = Measurements(data.trace);
    const MembershipParams params = PublicParams(config, data.instance);
    const QuadraticUtility& u = data.instance.utility();
    const std::optional<double> lambda = data.instance.barrier_weight();
    for (int count : counts) {
      const ReconstructionResult r = Estimate(config, ms.Window(0, count), params);
      CountOutcome o;
      o.count = count;
      o.status = r.status;
      o.nullspace_dim = r.nullspace_dim;
      o.error = ScaleNormalizedError(r, u.Q(), u.q(), lambda);
      o.success = (r.status == Status::kUnique ||
                   r.status == Status::kUniqueUpToScale) &&
                  o.error <= config.tolerances.success;
      rec.outcomes.push_back(o);
    }
  });
}

std::string SweepCsv(const ExperimentConfig& config) {
  const std::vector<CountSummary> rows = Summarize(config, EvaluateCounts(config));
  std::ostringstream out;
  out << "count,trials,successes,success_rate\n";
  for (const CountSummary& r : rows) {
    out << r.count << "," << r.trials << "," << r.successes << ","
        << FormatDouble(static_cast<double>(r.successes) / r.trials) << "\n";
  }
  return out.str();
}

VerificationReport VerifyTheorem(Theorem theorem, const ExperimentConfig& config) {
  ValidateConfig(config);
  const auto require = [&](bool condition, const std::string& why) {
    if (!condition) {
      throw InvalidArgumentError(std::string(TheoremName(theorem)) + ": " + why);
    }
  };
  const auto start = std::chrono::steady_clock::now();
  VerificationReport report;
  switch (theorem) {
    case Theorem::kT1:
      require(config.mode == Mode::kConstant || config.mode == Mode::kDiminishing,
              "needs mode constant or diminishing");
      require(config.n >= 3,
              "needs n >= 3; for n < 3 the membership set never becomes a "
              "singleton, since the iterates cannot supply enough independent "
              "equations");
      report = ThresholdReport(theorem, config);
      break;
    case Theorem::kT2:
      require(config.mode == Mode::kFinite, "needs mode finite");
      require(config.n >= 5, "needs n >= 5 for the independence bookkeeping");
      report = ThresholdReport(theorem, config);
      break;
    case Theorem::kT4:
      require(config.mode == Mode::kConstrained, "needs mode constrained");
      require(config.n >= 6, "needs n >= 6 for the independence bookkeeping");
      report = ThresholdReport(theorem, config);
      break;
    case Theorem::kT3:
      require(config.mode == Mode::kAgentDependent && !config.barrier,
              "needs mode agent_dependent without barrier");
      report = ImpossibilityReport(config);
      break;
    case Theorem::kT5:
      require(config.mode == Mode::kAgentDependent && config.barrier,
              "needs mode agent_dependent with barrier=true");
      report = ImpossibilityReport(config);
      break;
    case Theorem::kConvergence:
      require(config.mode == Mode::kAgentDependent,
              "needs mode agent_dependent (values are redrawn inside the Wolfe "
              "interval per trial)");
      report = ConvergenceReport(config);
      break;
    case Theorem::kL1:
      require(config.mode == Mode::kConstant, "needs mode constant");
      report = IndependenceReport(config);
      break;
    case Theorem::kL2:
      require(config.mode == Mode::kFinite, "needs mode finite");
      report = IndependenceReport(config);
      break;
    case Theorem::kL4:
      require(config.mode == Mode::kConstrained, "needs mode constrained");
      report = IndependenceReport(config);
      break;
  }
  report.theorem = std::string(TheoremName(theorem));
  report.config_hash = ConfigHash(config);
  report.config_json = ConfigToJson(config);
  report.tolerances = config.tolerances;
  report.wall_seconds = std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - start)
                            .count();
  return report;
}

std::string VerificationReport::ToJson() const {
  Json j;
  j["theorem"] = theorem;
  j["tool_version"] = std::string(ToolVersion());
  j["config_hash"] = config_hash;
  j["config"] = config_json.empty() ? Json(nullptr) : internal::ParseJson(config_json);
  j["tolerances"] = TolerancesJson(tolerances);
  j["required_k"] = OptionalJson(required_k);
  j["threshold_count"] = OptionalJson(threshold_count);
  j["observed_transition_count"] = OptionalJson(observed_transition_count);
  j["expected_nullspace_dim"] = OptionalJson(expected_nullspace_dim);
  Json rows = Json::array();
  for (const CountSummary& r : per_count) {
    rows.push_back({{"count", r.count},
                    {"successes", r.successes},
                    {"trials", r.trials},
                    {"success_rate", static_cast<double>(r.successes) / r.trials}});
  }
  j["success_by_count"] = std::move(rows);
  Json table = Json::array();
  for (const TrialRecord& r : trials) {
    Json row;
    row["trial"] = r.trial;
    row["redraws"] = r.redraws;
    if (!r.outcomes.empty()) {
      Json statuses = Json::array();
      Json dims = Json::array();
      Json errors = Json::array();
      for (const CountOutcome& o : r.outcomes) {
        statuses.push_back(std::string(StatusName(o.status)));
        dims.push_back(o.nullspace_dim);
        errors.push_back(o.error);
      }
      row["statuses"] = std::move(statuses);
      row["nullspace_dims"] = std::move(dims);
      row["errors"] = std::move(errors);
    }
    if (r.holds) row["holds"] = *r.holds;
    if (r.metric) row["metric"] = *r.metric;
    if (r.contrast_failed) row["contrast_failed"] = *r.contrast_failed;
    table.push_back(std::move(row));
  }
  j["trials"] = std::move(table);
  j["pass_rate"] = pass_rate;
  j["contrast_failure_rate"] = OptionalJson(contrast_failure_rate);
  j["verdict"] = passed ? "pass" : "fail";
  j["notes"] = notes;
  return internal::DumpJson(j);
}

std::vector<std::filesystem::path> Simulate(const ExperimentConfig& config,
                                            const std::filesystem::path& out_dir) {
  ValidateConfig(config);
  std::filesystem::create_directories(out_dir);
  const int horizon = config.horizon > 0 ? config.horizon : config.counts().back();
  std::vector<std::filesystem::path> written;
  for (int t = 0; t < config.trials; ++t) {
    const TrialData data = GenerateTrial(config, t, horizon);
    char stem[32];
    std::snprintf(stem, sizeof(stem), "%04d", t);
    const auto trace_csv = out_dir / ("trace_" + std::string(stem) + ".csv");
    const auto sidecar = out_dir / ("trace_" + std::string(stem) + ".json");
    const auto meas_csv = out_dir / ("measurements_" + std::string(stem) + ".csv");
    {
      std::ofstream out(trace_csv, std::ios::binary);
      WriteTraceCsv(data.trace, out);
      if (!out) throw std::runtime_error("failed writing " + trace_csv.string());
    }
    {
      std::ofstream out(sidecar, std::ios::binary);
      out << TraceSidecarJson(data.trace, config.expose_steps);
      if (!out) throw std::runtime_error("failed writing " + sidecar.string());
    }
    {
      std::ofstream out(meas_csv, std::ios::binary);
      WriteMeasurementsCsv(Measurements(data.trace), out);
      if (!out) throw std::runtime_error("failed writing " + meas_csv.string());
    }
    written.insert(written.end(), {trace_csv, sidecar, meas_csv});
  }
  return written;
}

}  // namespace gradrecon
