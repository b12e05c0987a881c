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

#ifndef GRADRECON_RECONSTRUCT_H_
#define GRADRECON_RECONSTRUCT_H_

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "gradrecon/qp.h"
#include "gradrecon/trajectory.h"

namespace gradrecon {

enum class Status { kUnique, kUniqueUpToScale, kUnderdetermined, kInconsistent };

std::string_view StatusName(Status status);
Status ParseStatus(std::string_view name);

// Outcome of an eavesdropper estimator.
//
// kUnique: the consistent set is a single point. For the constant and
// diminishing estimators that point is (alpha Q, alpha q) (resp. (cQ, cq)),
// since the step only shows up as a scale; every other estimator resolves the
// scale and returns the exact (Q, q[, lambda]) with gamma_hat = 1.
// kUniqueUpToScale: a single ray; the representative is normalized so that
// the first inverse step equals 1 / min(A).
struct ReconstructionResult {
  Status status = Status::kInconsistent;
  std::optional<Matrix> quadratic_hat;
  std::optional<Vector> linear_hat;
  std::optional<double> lambda_hat;
  // Q = gamma_hat * quadratic_hat when known.
  std::optional<double> gamma_hat;
  int nullspace_dim = 0;
  // Relative residual of the selected solution.
  double residual = 0.0;
};

struct ReconstructOptions {
  double residual_tolerance = 1e-8;
  double rank_multiplier = 64.0;
  double snap_tolerance = 1e-6;
  double dedup_tolerance = 1e-6;
  std::uint64_t enumeration_budget = 1'000'000;
};

// Known constant step: solves y[t] = Q'x[t] + q'.
ReconstructionResult ReconstructConstant(const MeasurementSet& ms,
                                         const ReconstructOptions& options = {});

// alpha[t] = c / max(t,1)^delta with public delta: rescales y[t] by
// max(t,1)^delta (t is the absolute iteration index) and solves as above.
ReconstructionResult ReconstructDiminishing(
    const MeasurementSet& ms, double delta,
    const ReconstructOptions& options = {});

// Enumerates every step sequence in A^|ms|; one linear solve per hypothesis.
// Throws BudgetExceededError if |A|^|ms| > options.enumeration_budget.
ReconstructionResult ReconstructFiniteEnum(
    const MeasurementSet& ms, const std::vector<double>& step_values,
    const ReconstructOptions& options = {});

// beta[t] = 1/alpha[t] as unknowns: nullspace of one homogeneous system,
// then the scale is snapped onto {1/alpha : alpha in A} when unambiguous.
ReconstructionResult ReconstructFinitePoly(
    const MeasurementSet& ms, const std::vector<double>& step_values,
    const ReconstructOptions& options = {});

// Log-barrier dynamics with public (C, d). With `known_lambda` the barrier
// column moves to the right-hand side and the scale is fixed by lambda.
ReconstructionResult ReconstructConstrained(
    const MeasurementSet& ms, const ConstraintSet& constraints,
    const std::vector<double>& step_values,
    const ReconstructOptions& options = {},
    std::optional<double> known_lambda = std::nullopt);

// Per-coordinate steps: B[t] diagonal unknowns. Reports the nullspace
// dimension of the linearized system; never kUnique.
ReconstructionResult ReconstructAgentDependent(
    const MeasurementSet& ms, const std::vector<double>& step_values,
    const ConstraintSet* constraints = nullptr,
    const ReconstructOptions& options = {});

enum class Mode { kConstant, kDiminishing, kFinite, kConstrained, kAgentDependent };

std::string_view ModeName(Mode mode);
// Throws InvalidArgumentError for unknown names.
Mode ParseMode(std::string_view name);

// Threshold on the iteration index k (M[k] holds k+1 measurements) from the
// identifiability theorems: ceil((n+1)/2) for constant/diminishing steps,
// ceil((n+3)/2) for finite random steps, ceil((n+3)/2 + 1/n) for the barrier
// case. None for agent-dependent steps.
std::optional<int> RequiredK(Mode mode, int n);

// Whether n satisfies the dimension hypothesis behind RequiredK
// (n >= 3, 5, 6 respectively).
bool WithinHypotheses(Mode mode, int n);

struct MembershipParams {
  double delta = 1.0;
  std::vector<double> step_values;
  std::optional<ConstraintSet> constraints;
  std::optional<double> known_lambda;
  // Finite mode: use the enumeration estimator instead of the nullspace one.
  bool enumerate = false;
};

struct MembershipSummary {
  Status status = Status::kInconsistent;
  int nullspace_dim = 0;
  std::optional<int> required_k;
  bool within_hypotheses = false;
  ReconstructionResult result;
};

MembershipSummary SummarizeMembership(const MeasurementSet& ms, Mode mode,
                                      const MembershipParams& params,
                                      const ReconstructOptions& options = {});

// Unit-norm direction of (vech Q, q[, lambda]).
Vector ParameterDirection(const Matrix& Q, const Vector& q,
                          std::optional<double> lambda = std::nullopt);

// max-abs difference between the unit directions of the estimate and the
// truth; +inf when the estimate carries no parameters.
double ScaleNormalizedError(const ReconstructionResult& result,
                            const Matrix& Q, const Vector& q,
                            std::optional<double> lambda = std::nullopt);

}  // namespace gradrecon

#endif  // GRADRECON_RECONSTRUCT_H_
