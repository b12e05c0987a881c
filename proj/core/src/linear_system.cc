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

#include "gradrecon/linear_system.h"

#include <algorithm>
#include <limits>

#include "gradrecon/errors.h"

namespace gradrecon {
namespace {

Vector ColumnScales(const Matrix& a) {
  Vector scales(a.cols());
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    const double norm = a.col(j).norm();
    scales(j) = norm > 0.0 ? 1.0 / norm : 1.0;
  }
  return scales;
}

double RankTolerance(const Matrix& a, double sigma_max, double multiplier) {
  return static_cast<double>(std::max(a.rows(), a.cols())) * sigma_max *
         std::numeric_limits<double>::epsilon() * multiplier;
}

int CountAbove(const Vector& values, double tolerance) {
  return static_cast<int>((values.array() > tolerance).count());
}

}  // namespace

int VechSize(int n) { return n * (n + 1) / 2; }

int VechIndex(int i, int j, int n) {
  if (i < j) std::swap(i, j);
  // Columns 0..j-1 hold n, n-1, ..., n-j+1 entries.
  return j * n - j * (j - 1) / 2 + (i - j);
}

Vector Vech(const Matrix& symmetric) {
  const int n = static_cast<int>(symmetric.rows());
  Vector out(VechSize(n));
  for (int j = 0; j < n; ++j) {
    for (int i = j; i < n; ++i) out(VechIndex(i, j, n)) = symmetric(i, j);
  }
  return out;
}

Matrix Unvech(const Eigen::Ref<const Vector>& entries, int n) {
  if (entries.size() != VechSize(n)) {
    throw InvalidArgumentError("vech length does not match dimension");
  }
  Matrix out(n, n);
  for (int j = 0; j < n; ++j) {
    for (int i = j; i < n; ++i) {
      out(i, j) = out(j, i) = entries(VechIndex(i, j, n));
    }
  }
  return out;
}

void FillParameterBlock(Eigen::Ref<Matrix> coefficients, int row,
                        const Vector& x) {
  const int n = static_cast<int>(x.size());
  // (Q'x)_i = sum_j Q'_ij x_j; entry (i,j), i > j, appears in rows i and j.
  for (int j = 0; j < n; ++j) {
    for (int i = j; i < n; ++i) {
      const int col = VechIndex(i, j, n);
      coefficients(row + i, col) += x(j);
      if (i != j) coefficients(row + j, col) += x(i);
    }
  }
  const int q_offset = VechSize(n);
  for (int i = 0; i < n; ++i) coefficients(row + i, q_offset + i) = 1.0;
}

LinearSystem AssembleConstant(const MeasurementSet& ms) {
  if (ms.empty()) throw InvalidArgumentError("no measurements");
  LinearSystem sys;
  sys.layout.n = ms.dim();
  sys.layout.blocks = ms.size();
  const int n = sys.layout.n;
  sys.coefficients = Matrix::Zero(sys.layout.rows(), sys.layout.cols());
  sys.rhs.resize(sys.layout.rows());
  for (int t = 0; t < ms.size(); ++t) {
    FillParameterBlock(sys.coefficients, t * n, ms.x(t));
    sys.rhs.segment(t * n, n) = ms.y(t);
  }
  return sys;
}

LinearSystem AssembleHomogeneous(const MeasurementSet& ms,
                                 const ConstraintSet* barrier,
                                 bool per_coordinate) {
  if (ms.empty()) throw InvalidArgumentError("no measurements");
  if (barrier != nullptr && barrier->dim() != ms.dim()) {
    throw InvalidArgumentError("constraint dimension does not match measurements");
  }
  LinearSystem sys;
  UnknownLayout& layout = sys.layout;
  layout.n = ms.dim();
  layout.barrier = barrier != nullptr;
  layout.blocks = ms.size();
  layout.has_beta = true;
  layout.per_coordinate = per_coordinate;
  const int n = layout.n;

  sys.coefficients = Matrix::Zero(layout.rows(), layout.cols());
  sys.rhs = Vector::Zero(layout.rows());
  for (int t = 0; t < ms.size(); ++t) {
    const int row = t * n;
    FillParameterBlock(sys.coefficients, row, ms.x(t));
    if (barrier != nullptr) {
      sys.coefficients.block(row, layout.lambda_offset(), n, 1) =
          barrier->BarrierGradientSum(ms.x(t));
    }
    if (per_coordinate) {
      for (int i = 0; i < n; ++i) {
        sys.coefficients(row + i, layout.beta_offset() + t * n + i) =
            -ms.y(t)(i);
      }
    } else {
      sys.coefficients.block(row, layout.beta_offset() + t, n, 1) = -ms.y(t);
    }
  }
  return sys;
}

NullspaceAnalysis AnalyzeNullspace(const Matrix& a, double rank_multiplier,
                                   bool compute_basis) {
  NullspaceAnalysis out;
  const Eigen::Index cols = a.cols();
  if (a.rows() == 0) {
    out.nullity = static_cast<int>(cols);
    if (compute_basis) out.basis = Matrix::Identity(cols, cols);
    return out;
  }
  const Vector scales = ColumnScales(a);
  const Matrix scaled = a * scales.asDiagonal();

  const unsigned options = compute_basis ? static_cast<unsigned>(Eigen::ComputeFullV) : 0u;
  Eigen::BDCSVD<Matrix> svd(scaled, options);
  out.singular_values = svd.singularValues();
  const double sigma_max =
      out.singular_values.size() ? out.singular_values(0) : 0.0;
  out.tolerance = RankTolerance(a, sigma_max, rank_multiplier);
  out.rank = sigma_max > 0.0 ? CountAbove(out.singular_values, out.tolerance) : 0;
  out.nullity = static_cast<int>(cols) - out.rank;
  if (compute_basis && out.nullity > 0) {
    out.basis = scales.asDiagonal() * svd.matrixV().rightCols(out.nullity);
  }
  return out;
}

PseudoInverse::PseudoInverse(const Matrix& a, double rank_multiplier) {
  const Vector scales = ColumnScales(a);
  const Matrix scaled = a * scales.asDiagonal();
  Eigen::BDCSVD<Matrix> svd(scaled, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& sv = svd.singularValues();
  const double sigma_max = sv.size() ? sv(0) : 0.0;
  const double tolerance = RankTolerance(a, sigma_max, rank_multiplier);
  rank_ = sigma_max > 0.0 ? CountAbove(sv, tolerance) : 0;
  const Matrix& u = svd.matrixU();
  const Matrix& v = svd.matrixV();
  pinv_ = scales.asDiagonal() * v.leftCols(rank_) *
          sv.head(rank_).cwiseInverse().asDiagonal() *
          u.leftCols(rank_).transpose();
  range_ = u.leftCols(rank_);
}

}  // namespace gradrecon
