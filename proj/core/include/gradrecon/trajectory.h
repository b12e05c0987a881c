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

#ifndef GRADRECON_TRAJECTORY_H_
#define GRADRECON_TRAJECTORY_H_

#include <cstdint>
#include <vector>

#include "gradrecon/qp.h"
#include "gradrecon/rng.h"
#include "gradrecon/step_policy.h"

namespace gradrecon {

// Realized step matrices A[0..K-1], stored as their diagonals.
class StepRecord {
 public:
  void Append(const StepMatrix& a) { diagonals_.push_back(a.diagonal()); }
  int size() const { return static_cast<int>(diagonals_.size()); }
  const Vector& diagonal(int k) const { return diagonals_.at(k); }

 private:
  std::vector<Vector> diagonals_;
};

// Iterates x[0..K] of x[k+1] = x[k] - A[k] g(x[k]). The step record is the
// administrator's secret: estimators only ever see a MeasurementSet.
class Trace {
 public:
  Trace(ProblemInstance instance, StepSizePolicy policy,
        std::vector<Vector> iterates, StepRecord steps, std::uint64_t seed,
        std::uint64_t trial);

  const ProblemInstance& instance() const { return instance_; }
  const StepSizePolicy& policy() const { return policy_; }
  const std::vector<Vector>& iterates() const { return iterates_; }
  const Vector& x(int k) const { return iterates_.at(k); }
  int horizon() const { return static_cast<int>(iterates_.size()) - 1; }
  int dim() const { return instance_.dim(); }
  std::uint64_t seed() const { return seed_; }
  std::uint64_t trial() const { return trial_; }

  // Debug/export access only (trace sidecar with --expose-steps, tests).
  const StepRecord& hidden_steps() const { return steps_; }

 private:
  ProblemInstance instance_;
  StepSizePolicy policy_;
  std::vector<Vector> iterates_;
  StepRecord steps_;
  std::uint64_t seed_;
  std::uint64_t trial_;
};

// Pairs (x[t], y[t]) with y[t] = x[t] - x[t+1], for absolute iteration
// indices t = first_index, ..., first_index + size() - 1.
class MeasurementSet {
 public:
  MeasurementSet(std::vector<Vector> x, std::vector<Vector> y,
                 long first_index = 0);

  int size() const { return static_cast<int>(x_.size()); }
  bool empty() const { return x_.empty(); }
  int dim() const { return x_.empty() ? 0 : static_cast<int>(x_[0].size()); }
  long first_index() const { return first_index_; }

  // Absolute iteration index of the t-th pair.
  long index(int t) const { return first_index_ + t; }
  const Vector& x(int t) const { return x_.at(t); }
  const Vector& y(int t) const { return y_.at(t); }

  // `count` consecutive pairs starting at local offset `offset`.
  MeasurementSet Window(int offset, int count) const;

  // x[first] - sum_{s<t} y[s], i.e. the iterate chain rebuilt from the first
  // point; t ranges over 0..size().
  std::vector<Vector> ChainFromFirst() const;

 private:
  std::vector<Vector> x_;
  std::vector<Vector> y_;
  long first_index_;
};

// Runs K steps from x0. Throws InfeasiblePointError if a constrained iterate
// leaves {Cx < d}; the update is never damped or backtracked.
Trace Run(const ProblemInstance& instance, const StepSizePolicy& policy,
          const Vector& x0, int horizon, const CounterStream& stream,
          std::uint64_t seed = 0, std::uint64_t trial = 0);

MeasurementSet Measurements(const Trace& trace);

struct RankReport {
  int rank = 0;
  // Rank of the stack of [x[t]' 1] rows used in the estimators' systems.
  int augmented_rank = 0;
  Vector singular_values;
  double tolerance = 0.0;
  bool holds = false;
};

// Numerical rank of [x[0]'; ...; x[upto-1]'] with tolerance
// max(n, upto) * sigma_max * eps * 64.
RankReport CheckIndependence(const Trace& trace, int upto);

// |x[k] - x*| for every iterate. Unconstrained instances only.
std::vector<double> ConvergenceMetrics(const Trace& trace);

}  // namespace gradrecon

#endif  // GRADRECON_TRAJECTORY_H_
