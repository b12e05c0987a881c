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

#include "gradrecon/step_policy.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gradrecon/errors.h"

namespace gradrecon {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

void CheckPositive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw InvalidArgumentError(std::string(what) + " must be positive");
  }
}

void CheckFiniteSet(const std::vector<double>& values) {
  if (values.size() < 2) {
    throw InvalidArgumentError("step set needs at least two values");
  }
  for (double v : values) CheckPositive(v, "step value");
  std::vector<double> sorted = values;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw InvalidArgumentError("step set values must be distinct");
  }
}

void CheckEpsilons(double eps1, double eps2) {
  if (!(0.0 < eps1 && eps1 < eps2 && eps2 < 1.0)) {
    throw InvalidArgumentError("need 0 < eps1 < eps2 < 1");
  }
}

}  // namespace

StepSizePolicy StepSizePolicy::Constant(double alpha) {
  CheckPositive(alpha, "alpha");
  return StepSizePolicy(ConstantStep{alpha});
}

StepSizePolicy StepSizePolicy::Diminishing(double c, double delta) {
  CheckPositive(c, "c");
  if (!(delta > 0.5 && delta <= 1.0)) {
    throw InvalidArgumentError("delta must lie in (1/2, 1]");
  }
  return StepSizePolicy(DiminishingStep{c, delta});
}

StepSizePolicy StepSizePolicy::UniformFinite(std::vector<double> values) {
  CheckFiniteSet(values);
  return StepSizePolicy(UniformFiniteStep{std::move(values)});
}

StepSizePolicy StepSizePolicy::AgentDependent(std::vector<double> values) {
  CheckFiniteSet(values);
  return StepSizePolicy(AgentDependentStep{std::move(values)});
}

std::string_view StepSizePolicy::type_name() const {
  return std::visit(
      Overloaded{
          [](const ConstantStep&) { return std::string_view("constant"); },
          [](const DiminishingStep&) {
            return std::string_view("diminishing");
          },
          [](const UniformFiniteStep&) {
            return std::string_view("uniform_finite");
          },
          [](const AgentDependentStep&) {
            return std::string_view("agent_dependent");
          },
      },
      variant_);
}

const std::vector<double>& StepSizePolicy::finite_values() const {
  static const std::vector<double> kEmpty;
  if (const auto* u = std::get_if<UniformFiniteStep>(&variant_)) {
    return u->values;
  }
  if (const auto* a = std::get_if<AgentDependentStep>(&variant_)) {
    return a->values;
  }
  return kEmpty;
}

StepMatrix DrawStepMatrix(const StepSizePolicy& policy, long k, int n,
                          const CounterStream& stream) {
  if (k < 0) throw InvalidArgumentError("iteration index must be >= 0");
  if (n < 1) throw InvalidArgumentError("dimension must be >= 1");
  const auto uk = static_cast<std::uint64_t>(k);
  Vector diagonal(n);
  std::visit(
      Overloaded{
          [&](const ConstantStep& p) { diagonal.setConstant(p.alpha); },
          [&](const DiminishingStep& p) {
            const double denom =
                std::pow(static_cast<double>(std::max(k, 1L)), p.delta);
            diagonal.setConstant(p.c / denom);
          },
          [&](const UniformFiniteStep& p) {
            diagonal.setConstant(p.values[stream.Index(uk, 0, p.values.size())]);
          },
          [&](const AgentDependentStep& p) {
            for (int i = 0; i < n; ++i) {
              diagonal(i) = p.values[stream.Index(uk, static_cast<std::uint64_t>(i),
                                                  p.values.size())];
            }
          },
      },
      policy.variant());
  return StepMatrix(diagonal);
}

WolfeBounds ComputeWolfeBounds(const Matrix& Q, double eps1, double eps2) {
  CheckEpsilons(eps1, eps2);
  if (Q.rows() != Q.cols() || Q.rows() == 0) {
    throw InvalidArgumentError("Q must be square and nonempty");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(Q, Eigen::EigenvaluesOnly);
  const Vector& eig = solver.eigenvalues();
  if (!(eig(0) > 0.0)) throw InvalidArgumentError("Q must be positive definite");
  return WolfeBounds{(1.0 - eps2) / eig(0),
                     (2.0 - eps2) / eig(eig.size() - 1)};
}

PolicyValidity ValidatePolicy(const StepSizePolicy& policy, const Matrix& Q,
                              double eps1, double eps2) {
  PolicyValidity report;
  report.bounds = ComputeWolfeBounds(Q, eps1, eps2);
  Eigen::SelfAdjointEigenSolver<Matrix> solver(Q, Eigen::EigenvaluesOnly);
  const double lambda_max = solver.eigenvalues().maxCoeff();

  bool check_lower = true;
  std::visit(
      Overloaded{
          [&](const ConstantStep& p) {
            report.smallest_step = report.largest_step = p.alpha;
          },
          [&](const DiminishingStep& p) {
            // sup_k c / max(k,1)^delta = c; the infimum is 0.
            report.largest_step = p.c;
            report.smallest_step = 0.0;
            check_lower = false;
          },
          [&](const UniformFiniteStep& p) {
            report.smallest_step = *std::min_element(p.values.begin(), p.values.end());
            report.largest_step = *std::max_element(p.values.begin(), p.values.end());
          },
          [&](const AgentDependentStep& p) {
            report.smallest_step = *std::min_element(p.values.begin(), p.values.end());
            report.largest_step = *std::max_element(p.values.begin(), p.values.end());
          },
      },
      policy.variant());

  report.intermediate_condition =
      eps1 - 2.0 + report.largest_step * lambda_max < 0.0;

  std::ostringstream why;
  bool ok = true;
  if (!(report.largest_step < report.bounds.c2_max)) {
    ok = false;
    why << "largest step " << report.largest_step << " >= c2_max "
        << report.bounds.c2_max << "; ";
  }
  if (check_lower && !(report.smallest_step > report.bounds.c1_min)) {
    ok = false;
    why << "smallest step " << report.smallest_step << " <= c1_min "
        << report.bounds.c1_min << "; ";
  }
  if (!report.intermediate_condition) {
    ok = false;
    why << "eps1 - 2 + c2 lambda_max(Q) >= 0; ";
  }
  report.valid = ok;
  report.reason = ok ? "all admissible steps inside (c1_min, c2_max)" : why.str();
  return report;
}

}  // namespace gradrecon
