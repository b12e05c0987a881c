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

#include "gradrecon/trajectory.h"

#include <algorithm>
#include <limits>
#include <sstream>
#include <utility>

#include "gradrecon/errors.h"

namespace gradrecon {
namespace {

constexpr double kRankMultiplier = 64.0;

int NumericalRank(const Vector& singular_values, double tolerance) {
  int rank = 0;
  for (Eigen::Index i = 0; i < singular_values.size(); ++i) {
    if (singular_values(i) > tolerance) ++rank;
  }
  return rank;
}

}  // namespace

Trace::Trace(ProblemInstance instance, StepSizePolicy policy,
             std::vector<Vector> iterates, StepRecord steps,
             std::uint64_t seed, std::uint64_t trial)
    : instance_(std::move(instance)),
      policy_(std::move(policy)),
      iterates_(std::move(iterates)),
      steps_(std::move(steps)),
      seed_(seed),
      trial_(trial) {
  if (iterates_.empty()) throw InvalidArgumentError("trace has no iterates");
  if (steps_.size() != horizon()) {
    throw InvalidArgumentError("step record length must equal horizon");
  }
}

MeasurementSet::MeasurementSet(std::vector<Vector> x, std::vector<Vector> y,
                               long first_index)
    : x_(std::move(x)), y_(std::move(y)), first_index_(first_index) {
  if (x_.size() != y_.size()) {
    throw InvalidArgumentError("measurement x and y counts differ");
  }
  if (first_index_ < 0) throw InvalidArgumentError("negative first index");
  for (std::size_t t = 0; t < x_.size(); ++t) {
    if (x_[t].size() != x_[0].size() || y_[t].size() != x_[0].size()) {
      throw InvalidArgumentError("measurement pairs have mismatched dimensions");
    }
  }
  if (!x_.empty() && x_[0].size() == 0) {
    throw InvalidArgumentError("measurement vectors are empty");
  }
}

MeasurementSet MeasurementSet::Window(int offset, int count) const {
  if (offset < 0 || count < 0 || offset + count > size()) {
    throw InvalidArgumentError("measurement window out of range");
  }
  return MeasurementSet(
      std::vector<Vector>(x_.begin() + offset, x_.begin() + offset + count),
      std::vector<Vector>(y_.begin() + offset, y_.begin() + offset + count),
      first_index_ + offset);
}

std::vector<Vector> MeasurementSet::ChainFromFirst() const {
  std::vector<Vector> chain;
  if (x_.empty()) return chain;
  chain.reserve(x_.size() + 1);
  Vector running = x_[0];
  chain.push_back(running);
  for (const Vector& yt : y_) {
    running -= yt;
    chain.push_back(running);
  }
  return chain;
}

Trace Run(const ProblemInstance& instance, const StepSizePolicy& policy,
          const Vector& x0, int horizon, const CounterStream& stream,
          std::uint64_t seed, std::uint64_t trial) {
  const int n = instance.dim();
  if (horizon < 1) throw InvalidArgumentError("horizon must be >= 1");
  if (x0.size() != n) throw InvalidArgumentError("x0 has wrong dimension");
  if (instance.constrained() && !instance.constraints()->StrictlyFeasible(x0)) {
    throw InfeasiblePointError("x0 is not strictly feasible");
  }

  std::vector<Vector> iterates;
  iterates.reserve(static_cast<std::size_t>(horizon) + 1);
  iterates.push_back(x0);
  StepRecord steps;
  for (int k = 0; k < horizon; ++k) {
    const StepMatrix a = DrawStepMatrix(policy, k, n, stream);
    const Vector& xk = iterates.back();
    Vector next = xk - a * DescentDirection(instance, xk);
    if (!next.allFinite()) {
      std::ostringstream msg;
      msg << "iterate " << k + 1 << " overflowed";
      throw InfeasiblePointError(msg.str());
    }
    if (instance.constrained() &&
        !instance.constraints()->StrictlyFeasible(next)) {
      std::ostringstream msg;
      msg << "iterate " << k + 1 << " left the strictly feasible region (min "
          << "slack " << instance.constraints()->Slack(next).minCoeff()
          << "); step too large for the barrier geometry";
      throw InfeasiblePointError(msg.str());
    }
    steps.Append(a);
    iterates.push_back(std::move(next));
  }
  return Trace(instance, policy, std::move(iterates), std::move(steps), seed,
               trial);
}

MeasurementSet Measurements(const Trace& trace) {
  const int horizon = trace.horizon();
  std::vector<Vector> x;
  std::vector<Vector> y;
  x.reserve(horizon);
  y.reserve(horizon);
  for (int t = 0; t < horizon; ++t) {
    x.push_back(trace.x(t));
    y.push_back(trace.x(t) - trace.x(t + 1));
  }
  return MeasurementSet(std::move(x), std::move(y), 0);
}

RankReport CheckIndependence(const Trace& trace, int upto) {
  const int n = trace.dim();
  if (upto < 1 || upto > n || upto > trace.horizon() + 1) {
    throw InvalidArgumentError(
        "upto must lie in [1, min(n, trace length)]");
  }
  Matrix stack(upto, n);
  Matrix augmented(upto, n + 1);
  for (int t = 0; t < upto; ++t) {
    stack.row(t) = trace.x(t).transpose();
    augmented.row(t).head(n) = trace.x(t).transpose();
    augmented(t, n) = 1.0;
  }
  const double eps = std::numeric_limits<double>::epsilon();

  RankReport report;
  Eigen::JacobiSVD<Matrix> svd(stack);
  report.singular_values = svd.singularValues();
  const double sigma_max =
      report.singular_values.size() ? report.singular_values(0) : 0.0;
  report.tolerance = std::max(n, upto) * sigma_max * eps * kRankMultiplier;
  report.rank = sigma_max > 0.0
                    ? NumericalRank(report.singular_values, report.tolerance)
                    : 0;

  Eigen::JacobiSVD<Matrix> aug_svd(augmented);
  const Vector& aug_sv = aug_svd.singularValues();
  const double aug_tol =
      std::max(n + 1, upto) * aug_sv(0) * eps * kRankMultiplier;
  report.augmented_rank = NumericalRank(aug_sv, aug_tol);
  report.holds = report.rank == upto;
  return report;
}

std::vector<double> ConvergenceMetrics(const Trace& trace) {
  if (trace.instance().constrained()) {
    throw InvalidArgumentError(
        "convergence metrics need an unconstrained instance");
  }
  const Vector optimum = Optimum(trace.instance().utility());
  std::vector<double> distances;
  distances.reserve(trace.iterates().size());
  for (const Vector& x : trace.iterates()) {
    distances.push_back((x - optimum).norm());
  }
  return distances;
}

}  // namespace gradrecon
