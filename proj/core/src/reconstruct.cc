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

#include "gradrecon/reconstruct.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "gradrecon/errors.h"
#include "gradrecon/linear_system.h"
#include "parallel.h"

namespace gradrecon {
namespace {

void CheckStepValues(const std::vector<double>& values) {
  if (values.empty()) throw InvalidArgumentError("step set is empty");
  for (double v : values) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw InvalidArgumentError("step values must be positive");
    }
  }
}

bool IsPositiveDefinite(const Matrix& m) {
  Eigen::LLT<Matrix> llt(m);
  return llt.info() == Eigen::Success;
}

double Relative(double residual_norm, double reference_norm) {
  return reference_norm > 0.0 ? residual_norm / reference_norm : residual_norm;
}

void FillParameters(ReconstructionResult& result, const UnknownLayout& layout,
                    const Vector& z) {
  result.quadratic_hat = Unvech(z.head(layout.vech_size()), layout.n);
  result.linear_hat = z.segment(layout.q_offset(), layout.n);
  if (layout.barrier) result.lambda_hat = z(layout.lambda_offset());
}

// Solves an inhomogeneous system whose steps are known (or hypothesized).
ReconstructionResult SolveKnownSteps(const LinearSystem& sys,
                                     const ReconstructOptions& options) {
  ReconstructionResult result;
  const PseudoInverse pinv(sys.coefficients, options.rank_multiplier);
  const Vector z = pinv.Solve(sys.rhs);
  result.nullspace_dim = pinv.nullity();
  result.residual = Relative(pinv.Residual(sys.rhs).norm(), sys.rhs.norm());
  if (result.residual > options.residual_tolerance) {
    result.status = Status::kInconsistent;
  } else if (result.nullspace_dim > 0) {
    result.status = Status::kUnderdetermined;
  } else {
    result.status = Status::kUnique;
    FillParameters(result, sys.layout, z);
  }
  return result;
}

// Index of the admissible inverse step within snap tolerance of `beta`, or -1.
int SnapIndex(double beta, const std::vector<double>& inverse_steps,
              double tolerance) {
  for (std::size_t i = 0; i < inverse_steps.size(); ++i) {
    if (std::abs(beta - inverse_steps[i]) <= tolerance * inverse_steps[i]) {
      return static_cast<int>(i);
    }
  }
  return -1;
}

std::vector<double> InverseSteps(const std::vector<double>& steps) {
  std::vector<double> inverse;
  inverse.reserve(steps.size());
  for (double a : steps) inverse.push_back(1.0 / a);
  std::sort(inverse.begin(), inverse.end());
  inverse.erase(std::unique(inverse.begin(), inverse.end()), inverse.end());
  return inverse;
}

// Nullspace estimator shared by the finite-step and barrier cases.
ReconstructionResult SolveHomogeneous(const LinearSystem& sys,
                                      const std::vector<double>& steps,
                                      const ReconstructOptions& options) {
  const UnknownLayout& layout = sys.layout;
  ReconstructionResult result;
  const NullspaceAnalysis analysis =
      AnalyzeNullspace(sys.coefficients, options.rank_multiplier, true);
  result.nullspace_dim = analysis.nullity;
  if (analysis.nullity == 0) {
    // Only the trivial solution: no positive-step explanation exists.
    const Vector& sv = analysis.singular_values;
    result.residual = sv.size() ? sv(sv.size() - 1) / sv(0) : 0.0;
    result.status = Status::kInconsistent;
    return result;
  }
  if (analysis.nullity >= 2) {
    result.status = Status::kUnderdetermined;
    return result;
  }

  Vector z = analysis.basis.col(0);
  if (Unvech(z.head(layout.vech_size()), layout.n).trace() < 0.0) z = -z;

  const int beta_count = layout.beta_count();
  const auto betas = [&] { return z.segment(layout.beta_offset(), beta_count); };
  const double beta_part_norm =
      (sys.coefficients.rightCols(beta_count) * betas()).norm();
  result.residual = Relative((sys.coefficients * z).norm(), beta_part_norm);

  const Matrix q_hat = Unvech(z.head(layout.vech_size()), layout.n);
  const bool positive_steps = betas().minCoeff() > 0.0;
  const bool positive_lambda = !layout.barrier || z(layout.lambda_offset()) > 0.0;
  if (!positive_steps || !positive_lambda || !IsPositiveDefinite(q_hat) ||
      result.residual > options.residual_tolerance) {
    result.status = Status::kInconsistent;
    return result;
  }

  const double alpha_min = *std::min_element(steps.begin(), steps.end());
  z *= (1.0 / alpha_min) / z(layout.beta_offset());

  // Every gamma mapping beta[0] onto some admissible 1/alpha is a candidate;
  // it survives if it maps every other beta onto the admissible set too.
  const std::vector<double> inverse = InverseSteps(steps);
  std::vector<double> valid_gammas;
  for (double target : inverse) {
    const double gamma = target / z(layout.beta_offset());
    bool all_snap = true;
    for (int t = 0; t < beta_count && all_snap; ++t) {
      all_snap = SnapIndex(gamma * z(layout.beta_offset() + t), inverse,
                           options.snap_tolerance) >= 0;
    }
    if (all_snap) valid_gammas.push_back(gamma);
  }

  if (valid_gammas.size() == 1) {
    z *= valid_gammas.front();
    result.status = Status::kUnique;
    result.gamma_hat = 1.0;
  } else {
    result.status = Status::kUniqueUpToScale;
  }
  FillParameters(result, layout, z);
  return result;
}

}  // namespace

std::string_view StatusName(Status status) {
  switch (status) {
    case Status::kUnique:
      return "Unique";
    case Status::kUniqueUpToScale:
      return "UniqueUpToScale";
    case Status::kUnderdetermined:
      return "Underdetermined";
    case Status::kInconsistent:
      return "Inconsistent";
  }
  return "Inconsistent";
}

Status ParseStatus(std::string_view name) {
  for (Status s : {Status::kUnique, Status::kUniqueUpToScale,
                   Status::kUnderdetermined, Status::kInconsistent}) {
    if (StatusName(s) == name) return s;
  }
  throw InvalidArgumentError("unknown status: " + std::string(name));
}

ReconstructionResult ReconstructConstant(const MeasurementSet& ms,
                                         const ReconstructOptions& options) {
  return SolveKnownSteps(AssembleConstant(ms), options);
}

ReconstructionResult ReconstructDiminishing(const MeasurementSet& ms,
                                            double delta,
                                            const ReconstructOptions& options) {
  if (!(delta > 0.5 && delta <= 1.0)) {
    throw InvalidArgumentError("delta must lie in (1/2, 1]");
  }
  LinearSystem sys = AssembleConstant(ms);
  const int n = ms.dim();
  for (int t = 0; t < ms.size(); ++t) {
    const double index = static_cast<double>(std::max(ms.index(t), 1L));
    sys.rhs.segment(t * n, n) *= std::pow(index, delta);
  }
  return SolveKnownSteps(sys, options);
}

ReconstructionResult ReconstructFiniteEnum(const MeasurementSet& ms,
                                           const std::vector<double>& step_values,
                                           const ReconstructOptions& options) {
  CheckStepValues(step_values);
  if (ms.empty()) throw InvalidArgumentError("no measurements");
  const int count = ms.size();
  const std::uint64_t s = step_values.size();
  std::uint64_t hypotheses = 1;
  for (int t = 0; t < count; ++t) {
    if (hypotheses > options.enumeration_budget / s) {
      throw BudgetExceededError(
          "step-sequence enumeration needs " + std::to_string(s) + "^" +
          std::to_string(count) + " hypotheses, over the budget of " +
          std::to_string(options.enumeration_budget));
    }
    hypotheses *= s;
  }

  const LinearSystem sys = AssembleConstant(ms);
  const UnknownLayout& layout = sys.layout;
  const int n = layout.n;
  const PseudoInverse pinv(sys.coefficients, options.rank_multiplier);

  // The hypothesis with inverse steps w[t] has rhs sum_t w[t] Y_t, where Y_t
  // is y[t] in block t. Solution and residual are linear in w.
  std::vector<Vector> partial_solution(count);
  std::vector<Vector> partial_residual(count);
  std::vector<double> y_norm_sq(count);
  for (int t = 0; t < count; ++t) {
    partial_solution[t] = pinv.matrix().middleCols(t * n, n) * ms.y(t);
    partial_residual[t] = pinv.range_basis() *
                          (pinv.range_basis().middleRows(t * n, n).transpose() * ms.y(t));
    partial_residual[t].segment(t * n, n) -= ms.y(t);
    y_norm_sq[t] = ms.y(t).squaredNorm();
  }

  struct Survivor {
    Vector z;
    double first_step;
    double residual;
  };
  struct ChunkResult {
    std::vector<Survivor> survivors;
    bool any_consistent = false;
    double best_residual = std::numeric_limits<double>::infinity();
  };

  const bool full_rank = pinv.nullity() == 0;
  const std::size_t chunks = internal::WorkerCount(hypotheses, 4096);
  std::vector<ChunkResult> per_chunk(chunks);
  internal::ParallelChunks(
      hypotheses, chunks,
      [&](std::size_t chunk, std::size_t begin, std::size_t end) {
        ChunkResult& out = per_chunk[chunk];
        // Digit t selects the step for measurement t; t = 0 is most
        // significant, so increasing index is lexicographic order.
        std::vector<std::uint64_t> digits(count);
        std::uint64_t rest = begin;
        for (int t = count - 1; t >= 0; --t) {
          digits[t] = rest % s;
          rest /= s;
        }
        Vector residual(sys.coefficients.rows());
        for (std::size_t h = begin; h < end; ++h) {
          residual.setZero();
          double rhs_sq = 0.0;
          for (int t = 0; t < count; ++t) {
            const double w = 1.0 / step_values[digits[t]];
            residual.noalias() += w * partial_residual[t];
            rhs_sq += w * w * y_norm_sq[t];
          }
          const double rel = Relative(residual.norm(), std::sqrt(rhs_sq));
          out.best_residual = std::min(out.best_residual, rel);
          if (rel <= options.residual_tolerance) {
            out.any_consistent = true;
            if (full_rank) {
              Vector z = Vector::Zero(layout.cols());
              for (int t = 0; t < count; ++t) {
                z.noalias() += (1.0 / step_values[digits[t]]) * partial_solution[t];
              }
              if (IsPositiveDefinite(Unvech(z.head(layout.vech_size()), n))) {
                out.survivors.push_back({std::move(z), step_values[digits[0]], rel});
              }
            }
          }
          for (int t = count - 1; t >= 0; --t) {
            if (++digits[t] < s) break;
            digits[t] = 0;
          }
        }
      });

  ReconstructionResult result;
  result.nullspace_dim = pinv.nullity();
  std::vector<Survivor> survivors;
  bool any_consistent = false;
  double best_residual = std::numeric_limits<double>::infinity();
  for (auto& c : per_chunk) {
    any_consistent = any_consistent || c.any_consistent;
    best_residual = std::min(best_residual, c.best_residual);
    for (auto& sv : c.survivors) survivors.push_back(std::move(sv));
  }
  result.residual = best_residual;

  if (!full_rank) {
    result.status =
        any_consistent ? Status::kUnderdetermined : Status::kInconsistent;
    return result;
  }
  if (survivors.empty()) {
    result.status = Status::kInconsistent;
    return result;
  }

  // Hypotheses that are uniform rescalings of each other give proportional
  // parameters; merge them by direction.
  std::vector<Vector> directions;
  for (const Survivor& sv : survivors) {
    const Vector u = sv.z.normalized();
    const bool seen = std::any_of(directions.begin(), directions.end(),
                                  [&](const Vector& d) {
                                    return (d - u).cwiseAbs().maxCoeff() <=
                                           options.dedup_tolerance;
                                  });
    if (!seen) directions.push_back(u);
  }
  if (directions.size() > 1) {
    result.status = Status::kUnderdetermined;
    return result;
  }

  const Survivor& first = survivors.front();
  result.residual = first.residual;
  if (survivors.size() == 1) {
    result.status = Status::kUnique;
    result.gamma_hat = 1.0;
    FillParameters(result, layout, first.z);
  } else {
    const double alpha_min =
        *std::min_element(step_values.begin(), step_values.end());
    result.status = Status::kUniqueUpToScale;
    FillParameters(result, layout, first.z * (first.first_step / alpha_min));
  }
  return result;
}

ReconstructionResult ReconstructFinitePoly(const MeasurementSet& ms,
                                           const std::vector<double>& step_values,
                                           const ReconstructOptions& options) {
  CheckStepValues(step_values);
  if (ms.size() < 2) {
    throw InvalidArgumentError("nullspace estimator needs at least two measurements");
  }
  return SolveHomogeneous(AssembleHomogeneous(ms, nullptr, false), step_values,
                          options);
}

ReconstructionResult ReconstructConstrained(const MeasurementSet& ms,
                                            const ConstraintSet& constraints,
                                            const std::vector<double>& step_values,
                                            const ReconstructOptions& options,
                                            std::optional<double> known_lambda) {
  CheckStepValues(step_values);
  if (ms.empty()) throw InvalidArgumentError("no measurements");
  for (int t = 0; t < ms.size(); ++t) {
    if (!constraints.StrictlyFeasible(ms.x(t))) {
      throw InfeasiblePointError("measurement " + std::to_string(t) +
                                 " is not strictly feasible");
    }
  }
  const LinearSystem full = AssembleHomogeneous(ms, &constraints, false);
  if (!known_lambda) return SolveHomogeneous(full, step_values, options);

  if (!(*known_lambda > 0.0)) {
    throw InvalidArgumentError("known lambda must be positive");
  }
  // Fold the barrier column into the right-hand side.
  const UnknownLayout& fl = full.layout;
  LinearSystem sys;
  sys.layout = fl;
  sys.layout.barrier = false;
  sys.coefficients.resize(fl.rows(), fl.cols() - 1);
  sys.coefficients << full.coefficients.leftCols(fl.lambda_offset()),
      full.coefficients.rightCols(fl.beta_count());
  sys.rhs = -*known_lambda * full.coefficients.col(fl.lambda_offset());

  ReconstructionResult result = SolveKnownSteps(sys, options);
  if (result.status != Status::kUnique) return result;

  const Vector z = PseudoInverse(sys.coefficients, options.rank_multiplier)
                       .Solve(sys.rhs);
  const std::vector<double> inverse = InverseSteps(step_values);
  bool snapped = true;
  for (int t = 0; t < sys.layout.beta_count(); ++t) {
    snapped = snapped && SnapIndex(z(sys.layout.beta_offset() + t), inverse,
                                   options.snap_tolerance) >= 0;
  }
  if (!snapped || !IsPositiveDefinite(*result.quadratic_hat)) {
    result = ReconstructionResult{Status::kInconsistent, {}, {}, {}, {},
                                  result.nullspace_dim, result.residual};
    return result;
  }
  result.lambda_hat = *known_lambda;
  result.gamma_hat = 1.0;
  return result;
}

ReconstructionResult ReconstructAgentDependent(
    const MeasurementSet& ms, const std::vector<double>& step_values,
    const ConstraintSet* constraints, const ReconstructOptions& options) {
  CheckStepValues(step_values);
  const LinearSystem sys = AssembleHomogeneous(ms, constraints, true);
  const NullspaceAnalysis analysis =
      AnalyzeNullspace(sys.coefficients, options.rank_multiplier, false);
  ReconstructionResult result;
  result.nullspace_dim = analysis.nullity;
  // The true parameters always solve the system, so a nonzero nullspace
  // exists; dimension >= 2 is the witness of a continuum of explanations.
  result.status = analysis.nullity >= 2 ? Status::kUnderdetermined
                                        : Status::kInconsistent;
  return result;
}

std::string_view ModeName(Mode mode) {
  switch (mode) {
    case Mode::kConstant:
      return "constant";
    case Mode::kDiminishing:
      return "diminishing";
    case Mode::kFinite:
      return "finite";
    case Mode::kConstrained:
      return "constrained";
    case Mode::kAgentDependent:
      return "agent_dependent";
  }
  return "constant";
}

Mode ParseMode(std::string_view name) {
  for (Mode m : {Mode::kConstant, Mode::kDiminishing, Mode::kFinite,
                 Mode::kConstrained, Mode::kAgentDependent}) {
    if (ModeName(m) == name) return m;
  }
  throw InvalidArgumentError("unknown mode: " + std::string(name));
}

std::optional<int> RequiredK(Mode mode, int n) {
  if (n < 1) throw InvalidArgumentError("dimension must be positive");
  switch (mode) {
    case Mode::kConstant:
    case Mode::kDiminishing:
      return (n + 2) / 2;
    case Mode::kFinite:
      return (n + 4) / 2;
    case Mode::kConstrained:
      // ceil((n^2 + 3n + 2) / (2n))
      return (n * n + 3 * n + 2 + 2 * n - 1) / (2 * n);
    case Mode::kAgentDependent:
      return std::nullopt;
  }
  return std::nullopt;
}

bool WithinHypotheses(Mode mode, int n) {
  switch (mode) {
    case Mode::kConstant:
    case Mode::kDiminishing:
      return n >= 3;
    case Mode::kFinite:
      return n >= 5;
    case Mode::kConstrained:
      return n >= 6;
    case Mode::kAgentDependent:
      return n >= 1;
  }
  return false;
}

MembershipSummary SummarizeMembership(const MeasurementSet& ms, Mode mode,
                                      const MembershipParams& params,
                                      const ReconstructOptions& options) {
  MembershipSummary summary;
  const int n = ms.dim();
  switch (mode) {
    case Mode::kConstant:
      summary.result = ReconstructConstant(ms, options);
      break;
    case Mode::kDiminishing:
      summary.result = ReconstructDiminishing(ms, params.delta, options);
      break;
    case Mode::kFinite:
      summary.result = params.enumerate
                           ? ReconstructFiniteEnum(ms, params.step_values, options)
                           : ReconstructFinitePoly(ms, params.step_values, options);
      break;
    case Mode::kConstrained:
      if (!params.constraints) {
        throw InvalidArgumentError("constrained mode needs (C, d)");
      }
      summary.result = ReconstructConstrained(ms, *params.constraints,
                                              params.step_values, options,
                                              params.known_lambda);
      break;
    case Mode::kAgentDependent:
      summary.result = ReconstructAgentDependent(
          ms, params.step_values,
          params.constraints ? &*params.constraints : nullptr, options);
      break;
  }
  summary.status = summary.result.status;
  summary.nullspace_dim = summary.result.nullspace_dim;
  summary.required_k = RequiredK(mode, n);
  summary.within_hypotheses = WithinHypotheses(mode, n);
  return summary;
}

Vector ParameterDirection(const Matrix& Q, const Vector& q,
                          std::optional<double> lambda) {
  const Vector vech = Vech(Q);
  Vector v(vech.size() + q.size() + (lambda ? 1 : 0));
  v.head(vech.size()) = vech;
  v.segment(vech.size(), q.size()) = q;
  if (lambda) v(v.size() - 1) = *lambda;
  const double norm = v.norm();
  return norm > 0.0 ? Vector(v / norm) : v;
}

double ScaleNormalizedError(const ReconstructionResult& result,
                            const Matrix& Q, const Vector& q,
                            std::optional<double> lambda) {
  if (!result.quadratic_hat || !result.linear_hat) {
    return std::numeric_limits<double>::infinity();
  }
  if (lambda && !result.lambda_hat) {
    return std::numeric_limits<double>::infinity();
  }
  const Vector estimate = ParameterDirection(
      *result.quadratic_hat, *result.linear_hat,
      lambda ? result.lambda_hat : std::nullopt);
  const Vector truth = ParameterDirection(Q, q, lambda);
  if (estimate.size() != truth.size()) {
    return std::numeric_limits<double>::infinity();
  }
  return (estimate - truth).cwiseAbs().maxCoeff();
}

}  // namespace gradrecon
