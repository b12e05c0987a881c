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

#include "gradrecon/qp.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "gradrecon/errors.h"

namespace gradrecon {
namespace {

constexpr double kMaxConditionNumber = 1e12;
constexpr double kEigenGapFraction = 1e-6;

bool AllFinite(const Matrix& m) { return m.allFinite(); }

// Phase-I barrier method: maximize s subject to Cx + s <= d, s <= 1 and
// |x| <= radius. Returns as soon as an iterate has s > 0.
std::optional<Vector> PhaseOneInteriorPoint(const Matrix& C, const Vector& d) {
  const int n = static_cast<int>(C.cols());
  const int m = static_cast<int>(C.rows());
  const double radius = 1e3 * (1.0 + d.cwiseAbs().maxCoeff());
  const double radius_sq = radius * radius;

  Vector x = Vector::Zero(n);
  double s = std::min((d - C * x).minCoeff() - 1.0, 0.0);
  if (s > 0.0) return x;

  auto objective = [&](const Vector& xv, double sv, double t) {
    const Vector r = d - C * xv - Vector::Constant(m, sv);
    const double w = radius_sq - xv.squaredNorm();
    if (r.minCoeff() <= 0.0 || sv >= 1.0 || w <= 0.0) {
      return std::numeric_limits<double>::infinity();
    }
    return -t * sv - r.array().log().sum() - std::log(1.0 - sv) - std::log(w);
  };

  for (double t = 1.0; t <= 1e10; t *= 8.0) {
    for (int iter = 0; iter < 100; ++iter) {
      const Vector r = d - C * x - Vector::Constant(m, s);
      const double w = radius_sq - x.squaredNorm();
      Vector grad(n + 1);
      Matrix hess = Matrix::Zero(n + 1, n + 1);
      grad.head(n) = C.transpose() * r.cwiseInverse() + 2.0 * x / w;
      grad(n) = -t + r.cwiseInverse().sum() + 1.0 / (1.0 - s);
      for (int i = 0; i < m; ++i) {
        Vector a(n + 1);
        a.head(n) = C.row(i).transpose();
        a(n) = 1.0;
        hess += a * a.transpose() / (r(i) * r(i));
      }
      hess.topLeftCorner(n, n) += 2.0 * Matrix::Identity(n, n) / w +
                                  4.0 * x * x.transpose() / (w * w);
      hess(n, n) += 1.0 / ((1.0 - s) * (1.0 - s));

      const Vector step = -hess.ldlt().solve(grad);
      const double decrement = -grad.dot(step);
      if (!std::isfinite(decrement) || decrement < 1e-12) break;

      const double f0 = objective(x, s, t);
      double tau = 1.0;
      while (tau > 1e-12) {
        const Vector xn = x + tau * step.head(n);
        const double sn = s + tau * step(n);
        if (objective(xn, sn, t) <= f0 - 0.25 * tau * decrement) {
          x = xn;
          s = sn;
          break;
        }
        tau *= 0.5;
      }
      if (s > 0.0) return x;
      if (tau <= 1e-12) break;
    }
  }
  return std::nullopt;
}

}  // namespace

QuadraticUtility::QuadraticUtility(Matrix quadratic, Vector linear)
    : quadratic_(std::move(quadratic)), linear_(std::move(linear)) {
  const auto n = linear_.size();
  if (n == 0) throw InvalidArgumentError("utility dimension must be positive");
  if (quadratic_.rows() != n || quadratic_.cols() != n) {
    throw InvalidArgumentError("Q must be n x n with n = size(q)");
  }
  if (!AllFinite(quadratic_) || !linear_.allFinite()) {
    throw InvalidArgumentError("utility parameters must be finite");
  }
  // Averaging makes Q(i,j) and Q(j,i) the same double bit pattern.
  const Matrix symmetric = 0.5 * (quadratic_ + quadratic_.transpose());
  quadratic_ = symmetric;
  if (Eigenvalues()(0) <= 0.0) {
    throw InvalidArgumentError("Q must be positive definite");
  }
}

Vector QuadraticUtility::Eigenvalues() const {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(quadratic_,
                                               Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

double QuadraticUtility::Value(const Vector& x) const {
  return -0.5 * x.dot(quadratic_ * x) - linear_.dot(x);
}

ConstraintSet::ConstraintSet(Matrix C, Vector d)
    : normals_(std::move(C)), bound_(std::move(d)) {
  if (normals_.rows() == 0 || normals_.cols() == 0) {
    throw InvalidArgumentError("constraint matrix must be nonempty");
  }
  if (normals_.rows() != bound_.size()) {
    throw InvalidArgumentError("C rows must match size(d)");
  }
  if (!AllFinite(normals_) || !bound_.allFinite()) {
    throw InvalidArgumentError("constraint data must be finite");
  }
  // Cheap candidate first: C x = d - 1 is solvable whenever C has full row
  // rank.
  const Vector target = bound_ - Vector::Ones(bound_.size());
  Vector candidate = normals_.completeOrthogonalDecomposition().solve(target);
  if (StrictlyFeasible(candidate)) {
    interior_point_ = std::move(candidate);
    return;
  }
  auto phase_one = PhaseOneInteriorPoint(normals_, bound_);
  if (!phase_one || !StrictlyFeasible(*phase_one)) {
    throw InvalidArgumentError("constraint set {x | Cx < d} is empty");
  }
  interior_point_ = std::move(*phase_one);
}

bool ConstraintSet::StrictlyFeasible(const Vector& x) const {
  return x.size() == dim() && Slack(x).minCoeff() > 0.0;
}

Vector ConstraintSet::BarrierGradientSum(const Vector& x) const {
  if (x.size() != dim()) {
    throw InvalidArgumentError("point dimension does not match constraints");
  }
  const Vector slack = Slack(x);
  if (!(slack.minCoeff() > 0.0)) {
    throw InfeasiblePointError(
        "barrier evaluated at or beyond the boundary: min slack = " +
        std::to_string(slack.minCoeff()));
  }
  return normals_.transpose() * slack.cwiseInverse();
}

ProblemInstance::ProblemInstance(QuadraticUtility utility)
    : utility_(std::move(utility)) {}

ProblemInstance::ProblemInstance(QuadraticUtility utility,
                                 ConstraintSet constraints,
                                 double barrier_weight)
    : utility_(std::move(utility)),
      constraints_(std::move(constraints)),
      barrier_weight_(barrier_weight) {
  if (constraints_->dim() != utility_.dim()) {
    throw InvalidArgumentError("constraint and utility dimensions differ");
  }
  if (!(barrier_weight > 0.0) || !std::isfinite(barrier_weight)) {
    throw InvalidArgumentError("barrier weight must be positive");
  }
}

QuadraticUtility SampleUtility(int n, double spectrum_lo, double spectrum_hi,
                               Rng& rng) {
  if (n < 1) throw InvalidArgumentError("dimension must be at least 1");
  if (!(spectrum_lo > 0.0) || !(spectrum_hi > spectrum_lo)) {
    throw InvalidArgumentError("need 0 < spectrum_lo < spectrum_hi");
  }

  Matrix gaussian(n, n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) gaussian(i, j) = rng.Normal();
  }
  Eigen::HouseholderQR<Matrix> qr(gaussian);
  Matrix basis = qr.householderQ() * Matrix::Identity(n, n);
  const Matrix& r = qr.matrixQR();
  for (int j = 0; j < n; ++j) {
    if (r(j, j) < 0.0) basis.col(j) *= -1.0;
  }

  const double min_gap = kEigenGapFraction * (spectrum_hi - spectrum_lo);
  Vector eigenvalues(n);
  for (;;) {
    for (int i = 0; i < n; ++i) {
      eigenvalues(i) = rng.Uniform(spectrum_lo, spectrum_hi);
    }
    Vector sorted = eigenvalues;
    std::sort(sorted.begin(), sorted.end());
    bool separated = true;
    for (int i = 1; i < n; ++i) {
      if (sorted(i) - sorted(i - 1) <= min_gap) separated = false;
    }
    if (separated) break;
  }

  Vector linear(n);
  for (int i = 0; i < n; ++i) linear(i) = rng.Normal();

  return QuadraticUtility(basis * eigenvalues.asDiagonal() * basis.transpose(),
                          std::move(linear));
}

Vector SampleInitialPoint(const ProblemInstance& instance, Rng& rng,
                          const InitialPointOptions& options) {
  const int n = instance.dim();
  if (!instance.constrained()) {
    Vector direction(n);
    do {
      for (int i = 0; i < n; ++i) direction(i) = rng.Normal();
    } while (direction.norm() == 0.0);
    const double radius = std::pow(rng.Uniform(), 1.0 / n);
    return radius / direction.norm() * direction;
  }

  const ConstraintSet& cs = *instance.constraints();
  // The box always contains the known interior point with some margin.
  const double half_width =
      std::max(options.box_radius,
               2.0 * cs.interior_point().cwiseAbs().maxCoeff() + 1.0);
  Vector x(n);
  for (long attempt = 0; attempt < options.max_rejections; ++attempt) {
    for (int i = 0; i < n; ++i) x(i) = rng.Uniform(-half_width, half_width);
    if (cs.StrictlyFeasible(x)) return x;
  }
  throw SamplingError("initial point rejection sampling gave up after " +
                      std::to_string(options.max_rejections) +
                      " rejections; feasible region is a tiny fraction of "
                      "the sampling box");
}

Vector Optimum(const QuadraticUtility& utility) {
  const Vector eig = utility.Eigenvalues();
  const double condition = eig(eig.size() - 1) / eig(0);
  if (!(condition <= kMaxConditionNumber)) {
    throw SingularMatrixError("Q is numerically singular (condition " +
                              std::to_string(condition) + ")");
  }
  return -utility.Q().llt().solve(utility.q());
}

Vector DescentDirection(const ProblemInstance& instance, const Vector& x) {
  if (x.size() != instance.dim()) {
    throw InvalidArgumentError("point dimension does not match instance");
  }
  const QuadraticUtility& u = instance.utility();
  Vector g = u.Q() * x + u.q();
  if (instance.constrained()) {
    g += *instance.barrier_weight() *
         instance.constraints()->BarrierGradientSum(x);
  }
  return g;
}

}  // namespace gradrecon
