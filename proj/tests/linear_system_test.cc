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

#include <gtest/gtest.h>

#include "gradrecon/errors.h"
#include "test_support.h"

namespace gradrecon {
namespace {

MeasurementSet HandPairs() {
  return MeasurementSet({Vector::Constant(1, 0.0), Vector::Constant(1, -0.1)},
                        {Vector::Constant(1, 0.1), Vector::Constant(1, 0.08)});
}

TEST(Vech, LowerTriangleColumnMajor) {
  Matrix S(3, 3);
  S << 1, 2, 4,
       2, 3, 5,
       4, 5, 6;
  Vector expected(6);
  expected << 1, 2, 4, 3, 5, 6;
  EXPECT_EQ(Vech(S), expected);
  EXPECT_EQ(VechIndex(2, 1, 3), 4);
  EXPECT_EQ(VechIndex(1, 2, 3), 4);
}

TEST(Vech, RoundTripIsIdentity) {
  Rng rng(6);
  for (int n = 1; n <= 8; ++n) {
    Vector v(VechSize(n));
    for (int i = 0; i < v.size(); ++i) v(i) = rng.Normal();
    const Matrix S = Unvech(v, n);
    EXPECT_EQ(S, S.transpose());
    EXPECT_EQ(Vech(S), v);
  }
}

TEST(AssembleConstant, OneDimensionalByHand) {
  const LinearSystem sys = AssembleConstant(HandPairs());
  Matrix expected(2, 2);
  expected << 0.0, 1.0,
              -0.1, 1.0;
  EXPECT_EQ(sys.coefficients, expected);
  EXPECT_NEAR(sys.rhs(0), 0.1, 1e-15);
  EXPECT_NEAR(sys.rhs(1), 0.08, 1e-15);
}

TEST(AssembleConstant, SinglePairInTwoDimensionsIsUnderdetermined) {
  const MeasurementSet ms({Vector::Ones(2)}, {Vector::Ones(2)});
  const LinearSystem sys = AssembleConstant(ms);
  EXPECT_EQ(sys.coefficients.rows(), 2);
  EXPECT_EQ(sys.coefficients.cols(), 5);
  EXPECT_GE(AnalyzeNullspace(sys.coefficients, 64, false).nullity, 3);
}

TEST(AssembleConstant, ShapeMatchesCounting) {
  for (int n = 1; n <= 6; ++n) {
    const Trace trace = testing::RunFromBall(testing::RandomInstance(n, n),
                                             StepSizePolicy::Constant(0.1), 7, n);
    for (int count = 1; count <= 7; ++count) {
      const LinearSystem sys = AssembleConstant(Measurements(trace).Window(0, count));
      EXPECT_EQ(sys.coefficients.rows(), n * count);
      EXPECT_EQ(sys.coefficients.cols(), n * (n + 3) / 2);
    }
  }
}

TEST(AssembleConstant, TrueScaledParametersSolveSystem) {
  const ProblemInstance instance = testing::RandomInstance(4, 2);
  const Trace trace = testing::RunFromBall(instance, StepSizePolicy::Constant(0.1), 6, 2);
  const LinearSystem sys = AssembleConstant(Measurements(trace));
  Vector z(sys.layout.cols());
  z << Vech(0.1 * instance.utility().Q()), 0.1 * instance.utility().q();
  EXPECT_LE((sys.coefficients * z - sys.rhs).norm(), 1e-14);
}

TEST(AssembleHomogeneous, LayoutColumns) {
  const ProblemInstance instance = testing::RandomConstrainedInstance(3, 1, 0.5);
  const Trace trace = testing::RunFromBall(instance, StepSizePolicy::UniformFinite({0.01, 0.02}), 4, 1);
  const MeasurementSet ms = Measurements(trace);
  EXPECT_EQ(AssembleHomogeneous(ms, nullptr, false).coefficients.cols(), 6 + 3 + 4);
  EXPECT_EQ(AssembleHomogeneous(ms, &*instance.constraints(), false).coefficients.cols(),
            6 + 3 + 1 + 4);
  EXPECT_EQ(AssembleHomogeneous(ms, nullptr, true).coefficients.cols(), 6 + 3 + 12);
  EXPECT_EQ(AssembleHomogeneous(ms, nullptr, true).coefficients.rows(), 12);
}

TEST(AssembleHomogeneous, TrueParametersAreANullVector) {
  const double lambda = 0.4;
  const ProblemInstance instance = testing::RandomConstrainedInstance(3, 9, lambda);
  const Trace trace = testing::RunFromBall(instance, StepSizePolicy::UniformFinite({0.01, 0.02}), 5, 9);
  const LinearSystem sys = AssembleHomogeneous(Measurements(trace), &*instance.constraints(), false);
  Vector z(sys.layout.cols());
  z.head(6) = Vech(instance.utility().Q());
  z.segment(6, 3) = instance.utility().q();
  z(9) = lambda;
  for (int k = 0; k < 5; ++k) z(10 + k) = 1.0 / trace.hidden_steps().diagonal(k)(0);
  EXPECT_LE((sys.coefficients * z).norm(), 1e-10 * z.norm());
}

TEST(AnalyzeNullspace, KnownRankDeficientMatrix) {
  Matrix a(3, 3);
  a << 1, 2, 3,
       4, 5, 6,
       7, 8, 9;
  const NullspaceAnalysis r = AnalyzeNullspace(a, 64, true);
  EXPECT_EQ(r.rank, 2);
  EXPECT_EQ(r.nullity, 1);
  ASSERT_EQ(r.basis.cols(), 1);
  EXPECT_LE((a * r.basis).norm(), 1e-12);
  EXPECT_GT(r.basis.norm(), 0.0);
}

TEST(AnalyzeNullspace, WideMatrixCountsMissingRows) {
  const NullspaceAnalysis r = AnalyzeNullspace(Matrix::Identity(2, 5), 64, true);
  EXPECT_EQ(r.nullity, 3);
  EXPECT_LE((Matrix::Identity(2, 5) * r.basis).norm(), 1e-14);
}

TEST(PseudoInverse, FullRankMatchesInverse) {
  Matrix a(2, 2);
  a << 2, 1,
       1, 3;
  const PseudoInverse p(a, 64);
  EXPECT_EQ(p.rank(), 2);
  EXPECT_LE((p.matrix() - a.inverse()).norm(), 1e-14);
}

}  // namespace
}  // namespace gradrecon
