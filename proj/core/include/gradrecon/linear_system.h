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

#ifndef GRADRECON_LINEAR_SYSTEM_H_
#define GRADRECON_LINEAR_SYSTEM_H_

#include "gradrecon/qp.h"
#include "gradrecon/trajectory.h"

namespace gradrecon {

// Half-vectorization: lower-triangular entries (i >= j) stacked column by
// column, so (0,0), (1,0), ..., (n-1,0), (1,1), ... .
int VechSize(int n);
int VechIndex(int i, int j, int n);
Vector Vech(const Matrix& symmetric);
Matrix Unvech(const Eigen::Ref<const Vector>& entries, int n);

// Column layout of an estimator's unknown vector:
//   [ vech(Q') | q' | lambda' (optional) | beta ... ]
// beta holds one scalar per measurement block, or n scalars per block when
// per_coordinate is set.
struct UnknownLayout {
  int n = 0;
  bool barrier = false;
  int blocks = 0;
  bool has_beta = false;
  bool per_coordinate = false;

  int vech_size() const { return VechSize(n); }
  int q_offset() const { return vech_size(); }
  int lambda_offset() const { return q_offset() + n; }
  int beta_offset() const { return lambda_offset() + (barrier ? 1 : 0); }
  int beta_count() const {
    return has_beta ? blocks * (per_coordinate ? n : 1) : 0;
  }
  int parameter_count() const { return beta_offset(); }
  int cols() const { return beta_offset() + beta_count(); }
  int rows() const { return n * blocks; }
};

struct LinearSystem {
  UnknownLayout layout;
  Matrix coefficients;
  // Zero for homogeneous formulations.
  Vector rhs;
};

// Rows encode Q'x[t] + q' = y[t] with Q' symmetric via vech. Unknowns:
// n(n+1)/2 + n.
LinearSystem AssembleConstant(const MeasurementSet& ms);

// Homogeneous system Phi z = 0 for
//   beta[t] y[t] = Q'x[t] + q' (+ lambda' sum_i C_i'/(d_i - C_i x[t]))
// with one beta per block, or a diagonal B[t] per block when per_coordinate.
// Throws InfeasiblePointError if a barrier denominator is not positive.
LinearSystem AssembleHomogeneous(const MeasurementSet& ms,
                                 const ConstraintSet* barrier,
                                 bool per_coordinate);

// Writes the vech/q coefficients for the block Q'x + q' at rows
// [row, row + n).
void FillParameterBlock(Eigen::Ref<Matrix> coefficients, int row,
                        const Vector& x);

// SVD-based numerical rank/nullspace. Columns are scaled to unit norm first
// (rank is invariant under column scaling); singular values below
// max(rows, cols) * sigma_max * eps * rank_multiplier count as zero.
struct NullspaceAnalysis {
  int rank = 0;
  int nullity = 0;
  double tolerance = 0.0;
  Vector singular_values;
  // Nullspace basis in the original (unscaled) variables; empty unless
  // requested.
  Matrix basis;
};

NullspaceAnalysis AnalyzeNullspace(const Matrix& a, double rank_multiplier,
                                   bool compute_basis);

// Truncated-SVD pseudo-inverse with the same rank rule, for repeated
// minimum-norm least-squares solves against one matrix.
class PseudoInverse {
 public:
  PseudoInverse(const Matrix& a, double rank_multiplier);

  int rank() const { return rank_; }
  int nullity() const { return static_cast<int>(pinv_.rows()) - rank_; }
  const Matrix& matrix() const { return pinv_; }
  Vector Solve(const Vector& b) const { return pinv_ * b; }

  // Orthonormal basis of the numerical range (leading left singular vectors).
  const Matrix& range_basis() const { return range_; }

  // b minus its projection onto the range. Computed from the orthonormal
  // basis, so its accuracy does not degrade with the condition number.
  Vector Residual(const Vector& b) const {
    return b - range_ * (range_.transpose() * b);
  }

 private:
  Matrix pinv_;
  Matrix range_;
  int rank_ = 0;
};

}  // namespace gradrecon

#endif  // GRADRECON_LINEAR_SYSTEM_H_
