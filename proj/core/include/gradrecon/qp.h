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

#ifndef GRADRECON_QP_H_
#define GRADRECON_QP_H_

#include <optional>

#include <Eigen/Dense>

#include "gradrecon/rng.h"

namespace gradrecon {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Secret parameters of the concave utility -(1/2) x'Qx - q'x. Q is stored
// exactly symmetric and is checked positive definite on construction.
class QuadraticUtility {
 public:
  QuadraticUtility(Matrix quadratic, Vector linear);

  int dim() const { return static_cast<int>(linear_.size()); }
  const Matrix& Q() const { return quadratic_; }
  const Vector& q() const { return linear_; }

  // Ascending eigenvalues of Q.
  Vector Eigenvalues() const;

  double Value(const Vector& x) const;

 private:
  Matrix quadratic_;
  Vector linear_;
};

// Polyhedron {x | Cx <= d} with nonempty interior.
class ConstraintSet {
 public:
  // Throws InvalidArgumentError if no strictly feasible point exists.
  ConstraintSet(Matrix C, Vector d);

  int num_constraints() const { return static_cast<int>(bound_.size()); }
  int dim() const { return static_cast<int>(normals_.cols()); }
  const Matrix& C() const { return normals_; }
  const Vector& d() const { return bound_; }

  // A point with Cx < d found at construction.
  const Vector& interior_point() const { return interior_point_; }

  // d - Cx.
  Vector Slack(const Vector& x) const { return bound_ - normals_ * x; }
  bool StrictlyFeasible(const Vector& x) const;

  // sum_i C_i' / (d_i - C_i x). Throws InfeasiblePointError if any slack is
  // not strictly positive.
  Vector BarrierGradientSum(const Vector& x) const;

 private:
  Matrix normals_;
  Vector bound_;
  Vector interior_point_;
};

class ProblemInstance {
 public:
  explicit ProblemInstance(QuadraticUtility utility);
  ProblemInstance(QuadraticUtility utility, ConstraintSet constraints,
                  double barrier_weight);

  int dim() const { return utility_.dim(); }
  const QuadraticUtility& utility() const { return utility_; }
  bool constrained() const { return constraints_.has_value(); }
  const std::optional<ConstraintSet>& constraints() const {
    return constraints_;
  }
  const std::optional<double>& barrier_weight() const {
    return barrier_weight_;
  }

 private:
  QuadraticUtility utility_;
  std::optional<ConstraintSet> constraints_;
  std::optional<double> barrier_weight_;
};

// Q = V diag(lambda) V' with V Haar-orthogonal (QR of a Gaussian matrix with
// sign correction) and lambda i.i.d. uniform on [lo, hi], redrawn until all
// pairwise gaps exceed 1e-6 (hi - lo); q has i.i.d. standard normal entries.
QuadraticUtility SampleUtility(int n, double spectrum_lo, double spectrum_hi,
                               Rng& rng);

struct InitialPointOptions {
  // Half-width of the box intersected with {Cx < d} for constrained sampling.
  double box_radius = 10.0;
  long max_rejections = 1'000'000;
};

// Unconstrained: uniform on the closed unit ball. Constrained: uniform on
// {Cx < d} intersected with a box, by rejection.
Vector SampleInitialPoint(const ProblemInstance& instance, Rng& rng,
                          const InitialPointOptions& options = {});

// Returns -Q^{-1} q. Throws SingularMatrixError when cond(Q) > 1e12.
Vector Optimum(const QuadraticUtility& utility);

// Qx + q, plus sum_i lambda/(d_i - C_i x) C_i' for constrained instances.
// The gradient iteration is x <- x - A g(x).
Vector DescentDirection(const ProblemInstance& instance, const Vector& x);

}  // namespace gradrecon

#endif  // GRADRECON_QP_H_
