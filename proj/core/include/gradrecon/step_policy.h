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

#ifndef GRADRECON_STEP_POLICY_H_
#define GRADRECON_STEP_POLICY_H_

#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "gradrecon/qp.h"
#include "gradrecon/rng.h"

namespace gradrecon {

struct ConstantStep {
  double alpha;
};

// alpha[k] = c / max(k, 1)^delta.
struct DiminishingStep {
  double c;
  double delta;
};

// One scalar per iteration, uniform over `values`.
struct UniformFiniteStep {
  std::vector<double> values;
};

// One independent draw per coordinate and iteration, uniform over `values`.
struct AgentDependentStep {
  std::vector<double> values;
};

class StepSizePolicy {
 public:
  using Variant = std::variant<ConstantStep, DiminishingStep,
                               UniformFiniteStep, AgentDependentStep>;

  // Validating factories; each throws InvalidArgumentError on a bad policy.
  static StepSizePolicy Constant(double alpha);
  static StepSizePolicy Diminishing(double c, double delta);
  static StepSizePolicy UniformFinite(std::vector<double> values);
  static StepSizePolicy AgentDependent(std::vector<double> values);

  const Variant& variant() const { return variant_; }

  // "constant", "diminishing", "uniform_finite" or "agent_dependent".
  std::string_view type_name() const;

  bool agent_dependent() const {
    return std::holds_alternative<AgentDependentStep>(variant_);
  }

  // The public step set for the two finite policies; empty otherwise.
  const std::vector<double>& finite_values() const;

 private:
  explicit StepSizePolicy(Variant v) : variant_(std::move(v)) {}
  Variant variant_;
};

using StepMatrix = Eigen::DiagonalMatrix<double, Eigen::Dynamic>;

// Realized step matrix A[k]. Scalar policies give alpha I. Random draws come
// from `stream` at counter (k, i), so the result is a pure function of
// (stream, k, n).
StepMatrix DrawStepMatrix(const StepSizePolicy& policy, long k, int n,
                          const CounterStream& stream);

struct WolfeBounds {
  double c1_min;
  double c2_max;
};

// c1_min = (1 - eps2) / lambda_min(Q), c2_max = (2 - eps2) / lambda_max(Q),
// valid for 0 < eps1 < eps2 < 1.
WolfeBounds ComputeWolfeBounds(const Matrix& Q, double eps1, double eps2);

struct PolicyValidity {
  bool valid = false;
  WolfeBounds bounds{};
  double smallest_step = 0.0;
  double largest_step = 0.0;
  // eps1 - 2 + largest_step * lambda_max(Q) < 0, the intermediate
  // requirement from which the upper bound is derived.
  bool intermediate_condition = false;
  std::string reason;
};

// Checks every admissible step value against the open interval
// (c1_min, c2_max). Diminishing schedules are only checked from above, since
// c/k^delta eventually drops under any positive lower bound.
PolicyValidity ValidatePolicy(const StepSizePolicy& policy, const Matrix& Q,
                              double eps1, double eps2);

}  // namespace gradrecon

#endif  // GRADRECON_STEP_POLICY_H_
