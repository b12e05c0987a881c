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
#include <numeric>

#include <gtest/gtest.h>

#include "gradrecon/errors.h"
#include "gradrecon/linear_system.h"
#include "test_support.h"

namespace gradrecon {
namespace {

using testing::MaxRelative;
using testing::RandomConstrainedInstance;
using testing::RandomInstance;
using testing::RunFromBall;
using testing::SymmetricAnnihilatorDim;

bool Identified(const ReconstructionResult& r) {
  return r.status == Status::kUnique || r.status == Status::kUniqueUpToScale;
}

void ExpectResultInvariants(const ReconstructionResult& r, double tolerance) {
  if (Identified(r)) {
    ASSERT_TRUE(r.quadratic_hat.has_value());
    EXPECT_EQ(*r.quadratic_hat, r.quadratic_hat->transpose());
    EXPECT_LE(r.residual, tolerance);
  }
  if (r.gamma_hat) EXPECT_GT(*r.gamma_hat, 0.0);
}

std::vector<Vector> Points(const MeasurementSet& ms) {
  std::vector<Vector> points;
  for (int t = 0; t < ms.size(); ++t) points.push_back(ms.x(t));
  return points;
}

TEST(ReconstructConstant, OneDimensionalByHand) {
  const MeasurementSet ms({Vector::Constant(1, 0.0), Vector::Constant(1, -0.1)},
                          {Vector::Constant(1, 0.1), Vector::Constant(1, 0.08)});
  const ReconstructionResult r = ReconstructConstant(ms);
  ASSERT_EQ(r.status, Status::kUnique);
  EXPECT_NEAR((*r.quadratic_hat)(0, 0), 0.2, 1e-14);
  EXPECT_NEAR((*r.linear_hat)(0), 0.1, 1e-14);
}

TEST(ReconstructConstant, SinglePairIsUnderdetermined) {
  const Trace trace = RunFromBall(RandomInstance(3, 1), StepSizePolicy::Constant(0.1), 4, 1);
  EXPECT_EQ(ReconstructConstant(Measurements(trace).Window(0, 1)).status,
            Status::kUnderdetermined);
}

TEST(ReconstructConstant, RecoversScaledParametersFromNPlusOnePairs) {
  for (int n = 3; n <= 6; ++n) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const ProblemInstance instance = RandomInstance(n, seed);
      const Trace trace = RunFromBall(instance, StepSizePolicy::Constant(0.1), n + 1, seed);
      const ReconstructionResult r = ReconstructConstant(Measurements(trace));
      ASSERT_EQ(r.status, Status::kUnique) << "n=" << n << " seed=" << seed;
      EXPECT_LE(MaxRelative(*r.quadratic_hat, 0.1 * instance.utility().Q()), 1e-8);
      EXPECT_LE(MaxRelative(*r.linear_hat, 0.1 * instance.utility().q()), 1e-8);
    }
  }
}

// The kernel of the constant-step system is {(S, -S x[0])} over symmetric S
// annihilating every x[t] - x[0]; its size decides uniqueness.
TEST(ReconstructConstant, NullityMatchesSymmetricAnnihilator) {
  for (int n = 3; n <= 6; ++n) {
    const Trace trace = RunFromBall(RandomInstance(n, 40 + n), StepSizePolicy::Constant(0.1),
                                    n + 1, 40 + n);
    const MeasurementSet ms = Measurements(trace);
    for (int count = 2; count <= n + 1; ++count) {
      const MeasurementSet w = ms.Window(0, count);
      const ReconstructionResult r = ReconstructConstant(w);
      const int oracle = SymmetricAnnihilatorDim(Points(w));
      EXPECT_EQ(r.nullspace_dim, oracle) << "n=" << n << " count=" << count;
      EXPECT_EQ(r.status == Status::kUnique, oracle == 0);
    }
  }
}

TEST(ReconstructConstant, HalfDimensionCountLeavesContinuum) {
  const Trace trace = RunFromBall(RandomInstance(3, 2), StepSizePolicy::Constant(0.1), 4, 2);
  const MeasurementSet w = Measurements(trace).Window(0, 2);
  const ReconstructionResult r = ReconstructConstant(w);
  EXPECT_EQ(r.status, Status::kUnderdetermined);
  EXPECT_EQ(r.nullspace_dim, SymmetricAnnihilatorDim(Points(w)));
  EXPECT_GT(r.nullspace_dim, 0);
}

TEST(ReconstructDiminishing, RecoversScaledParameters) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const ProblemInstance instance = RandomInstance(3, seed);
    const Trace trace = RunFromBall(instance, StepSizePolicy::Diminishing(0.2, 1.0), 6, seed);
    const ReconstructionResult r = ReconstructDiminishing(Measurements(trace).Window(1, 4), 1.0);
    ASSERT_EQ(r.status, Status::kUnique);
    EXPECT_LE(MaxRelative(*r.quadratic_hat, 0.2 * instance.utility().Q()), 1e-8);
    EXPECT_LE(MaxRelative(*r.linear_hat, 0.2 * instance.utility().q()), 1e-8);
  }
}

TEST(ReconstructDiminishing, ConstantStepDataIsInconsistent) {
  const Trace trace = RunFromBall(RandomInstance(3, 4), StepSizePolicy::Constant(0.1), 7, 4);
  EXPECT_EQ(ReconstructDiminishing(Measurements(trace).Window(1, 6), 1.0).status,
            Status::kInconsistent);
}

TEST(ReconstructDiminishing, SinglePairIsUnderdetermined) {
  const Trace trace = RunFromBall(RandomInstance(3, 4), StepSizePolicy::Diminishing(0.2, 0.6), 3, 4);
  EXPECT_EQ(ReconstructDiminishing(Measurements(trace).Window(1, 1), 0.6).status,
            Status::kUnderdetermined);
}

TEST(ReconstructFiniteEnum, SingletonSetRecoversExactParameters) {
  const ProblemInstance instance = RandomInstance(3, 6);
  const Trace trace = RunFromBall(instance, StepSizePolicy::Constant(0.1), 4, 6);
  const ReconstructionResult r = ReconstructFiniteEnum(Measurements(trace), {0.1});
  ASSERT_EQ(r.status, Status::kUnique);
  EXPECT_LE(MaxRelative(*r.quadratic_hat, instance.utility().Q()), 1e-8);
  EXPECT_LE(MaxRelative(*r.linear_hat, instance.utility().q()), 1e-8);
}

TEST(ReconstructFiniteEnum, RecoversGroundTruth) {
  const std::vector<double> values = {0.05, 0.1};
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const ProblemInstance instance = RandomInstance(5, seed);
    const Trace trace = RunFromBall(instance, StepSizePolicy::UniformFinite(values), 6, seed);
    const ReconstructionResult r = ReconstructFiniteEnum(Measurements(trace), values);
    ASSERT_TRUE(Identified(r)) << StatusName(r.status);
    EXPECT_LE(ScaleNormalizedError(r, instance.utility().Q(), instance.utility().q()), 1e-6);
    if (r.status == Status::kUnique) {
      EXPECT_LE(MaxRelative(*r.quadratic_hat, instance.utility().Q()), 1e-6);
    }
  }
}

TEST(ReconstructFiniteEnum, TwoPairsAreUnderdetermined) {
  const std::vector<double> values = {0.01, 0.02};
  const Trace trace = RunFromBall(RandomInstance(5, 3), StepSizePolicy::UniformFinite(values), 2, 3);
  EXPECT_EQ(ReconstructFiniteEnum(Measurements(trace), values).status, Status::kUnderdetermined);
}

TEST(ReconstructFiniteEnum, BudgetIsEnforced) {
  const std::vector<double> values = {0.01, 0.02};
  const Trace trace = RunFromBall(RandomInstance(2, 3), StepSizePolicy::UniformFinite(values), 12, 3);
  ReconstructOptions options;
  options.enumeration_budget = 1000;
  EXPECT_THROW(ReconstructFiniteEnum(Measurements(trace), values, options), BudgetExceededError);
}

TEST(ReconstructFinitePoly, AgreesWithEnumeration) {
  for (const std::vector<double>& values :
       {std::vector<double>{0.05, 0.1}, std::vector<double>{0.05, 0.1, 0.15}}) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const ProblemInstance instance = RandomInstance(5, seed);
      const Trace trace = RunFromBall(instance, StepSizePolicy::UniformFinite(values), 6, seed);
      const ReconstructionResult e = ReconstructFiniteEnum(Measurements(trace), values);
      const ReconstructionResult p = ReconstructFinitePoly(Measurements(trace), values);
      ASSERT_EQ(e.status, p.status) << "seed " << seed;
      if (e.status == Status::kUnique) {
        EXPECT_LE(MaxRelative(*p.quadratic_hat, *e.quadratic_hat), 1e-6);
        EXPECT_LE(MaxRelative(*p.linear_hat, *e.linear_hat), 1e-6);
      }
    }
  }
}

// In two dimensions three pairs already pin the step sequence through the
// residual test, while the continuous relaxation still has 8 unknowns for 6
// equations.
TEST(ReconstructFiniteEnum, UsesDiscretenessBeyondNullspaceEstimator) {
  const std::vector<double> values = {0.1, 0.2};
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const ProblemInstance instance = RandomInstance(2, seed);
    const Trace trace = RunFromBall(instance, StepSizePolicy::UniformFinite(values), 3, seed);
    const MeasurementSet ms = Measurements(trace);
    const ReconstructionResult p = ReconstructFinitePoly(ms, values);
    EXPECT_EQ(p.status, Status::kUnderdetermined);
    EXPECT_GE(p.nullspace_dim, 8 - 6);
    const ReconstructionResult e = ReconstructFiniteEnum(ms, values);
    ASSERT_TRUE(Identified(e)) << StatusName(e.status);
    EXPECT_LE(ScaleNormalizedError(e, instance.utility().Q(), instance.utility().q()), 1e-6);
  }
}

TEST(ReconstructFinitePoly, BelowCountBoundIsUnderdetermined) {
  // n(n+1)/(2(n-1)) = 3.75 for n = 5.
  const std::vector<double> values = {0.05, 0.1};
  const Trace trace = RunFromBall(RandomInstance(5, 8), StepSizePolicy::UniformFinite(values), 3, 8);
  const ReconstructionResult r = ReconstructFinitePoly(Measurements(trace), values);
  EXPECT_EQ(r.status, Status::kUnderdetermined);
  EXPECT_GE(r.nullspace_dim, 2);
}

TEST(ReconstructFinitePoly, SingletonSetSnapsToExactScale) {
  const ProblemInstance instance = RandomInstance(3, 12);
  const Trace trace = RunFromBall(instance, StepSizePolicy::Constant(0.1), 4, 12);
  const ReconstructionResult r = ReconstructFinitePoly(Measurements(trace), {0.1});
  ASSERT_EQ(r.status, Status::kUnique);
  EXPECT_EQ(r.nullspace_dim, 1);
  EXPECT_EQ(*r.gamma_hat, 1.0);
  EXPECT_LE(MaxRelative(*r.quadratic_hat, instance.utility().Q()), 1e-8);
}

TEST(ReconstructFinitePoly, ScaleCovariance) {
  const std::vector<double> values = {0.05, 0.1, 0.2};
  const double gamma = 2.0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const ProblemInstance base = RandomInstance(3, seed);
    const ProblemInstance scaled(
        QuadraticUtility(gamma * base.utility().Q(), gamma * base.utility().q()));
    std::vector<double> shrunk;
    for (double a : values) shrunk.push_back(a / gamma);
    const Trace t1 = RunFromBall(base, StepSizePolicy::UniformFinite(values), 6, seed);
    const Trace t2 = RunFromBall(scaled, StepSizePolicy::UniformFinite(shrunk), 6, seed);
    const MeasurementSet m1 = Measurements(t1), m2 = Measurements(t2);
    for (int t = 0; t < m1.size(); ++t) ASSERT_EQ(m1.y(t), m2.y(t));
    const ReconstructionResult r1 = ReconstructFinitePoly(m1, values);
    const ReconstructionResult r2 = ReconstructFinitePoly(m2, shrunk);
    ASSERT_EQ(r1.status, r2.status);
    ASSERT_TRUE(Identified(r1));
    const Vector d1 = ParameterDirection(*r1.quadratic_hat, *r1.linear_hat);
    const Vector d2 = ParameterDirection(*r2.quadratic_hat, *r2.linear_hat);
    EXPECT_LE((d1 - d2).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(ResidualSoundness, PermutedDifferencesAreNeverUnique) {
  const std::vector<double> values = {0.05, 0.1};
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Trace trace = RunFromBall(RandomInstance(3, seed), StepSizePolicy::UniformFinite(values), 7, seed);
    const MeasurementSet ms = Measurements(trace);
    std::vector<Vector> x, y;
    for (int t = 0; t < ms.size(); ++t) {
      x.push_back(ms.x(t));
      y.push_back(ms.y((t + 3) % ms.size()));
    }
    const MeasurementSet permuted(x, y);
    EXPECT_EQ(ReconstructConstant(permuted).status, Status::kInconsistent);
    EXPECT_EQ(ReconstructFinitePoly(permuted, values).status, Status::kInconsistent);
    EXPECT_EQ(ReconstructFiniteEnum(permuted, values).status, Status::kInconsistent);
  }
}

TEST(ReconstructConstrained, RecoversParametersAndBarrierWeight) {
  const std::vector<double> values = {0.05, 0.1};
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const double lambda = 0.3 + 0.05 * seed;
    const ProblemInstance instance = RandomConstrainedInstance(6, seed, lambda);
    const Trace trace = RunFromBall(instance, StepSizePolicy::UniformFinite(values), 7, seed);
    const MeasurementSet ms = Measurements(trace);
    const ReconstructionResult r = ReconstructConstrained(ms, *instance.constraints(), values);
    ASSERT_TRUE(Identified(r)) << StatusName(r.status);
    EXPECT_LE(ScaleNormalizedError(r, instance.utility().Q(), instance.utility().q(), lambda), 1e-6);
    const ReconstructionResult fewer =
        ReconstructConstrained(ms.Window(0, 6), *instance.constraints(), values);
    EXPECT_EQ(fewer.status, Status::kUnderdetermined);
  }
}

TEST(ReconstructConstrained, KnownBarrierWeightGivesExactParameters) {
  const std::vector<double> values = {0.005, 0.01};
  const double lambda = 0.5;
  const ProblemInstance instance = RandomConstrainedInstance(4, 3, lambda);
  const Trace trace = RunFromBall(instance, StepSizePolicy::UniformFinite(values), 6, 3);
  const ReconstructionResult r =
      ReconstructConstrained(Measurements(trace), *instance.constraints(), values, {}, lambda);
  ASSERT_EQ(r.status, Status::kUnique);
  EXPECT_EQ(*r.lambda_hat, lambda);
  EXPECT_LE(MaxRelative(*r.quadratic_hat, instance.utility().Q()), 1e-6);
  EXPECT_LE(MaxRelative(*r.linear_hat, instance.utility().q()), 1e-6);
}

TEST(ReconstructAgentDependent, NullityIsParameterCount) {
  const std::vector<double> values = {0.05, 0.1};
  for (int n = 2; n <= 4; ++n) {
    const Trace trace = RunFromBall(RandomInstance(n, n), StepSizePolicy::AgentDependent(values), 50, n);
    const MeasurementSet ms = Measurements(trace);
    for (int count : {1, 5, 20, 50}) {
      const ReconstructionResult r = ReconstructAgentDependent(ms.Window(0, count), values);
      EXPECT_EQ(r.status, Status::kUnderdetermined);
      EXPECT_EQ(r.nullspace_dim, n * (n + 3) / 2) << "n=" << n << " count=" << count;
    }
  }
}

TEST(ReconstructAgentDependent, BarrierAddsOneDimension) {
  const std::vector<double> values = {0.005, 0.01};
  const ProblemInstance instance = RandomConstrainedInstance(3, 2, 0.4);
  const Trace trace = RunFromBall(instance, StepSizePolicy::AgentDependent(values), 20, 2);
  const ReconstructionResult r =
      ReconstructAgentDependent(Measurements(trace), values, &*instance.constraints());
  EXPECT_EQ(r.status, Status::kUnderdetermined);
  EXPECT_EQ(r.nullspace_dim, 3 * 6 / 2 + 1);
}

TEST(Membership, RequiredCounts) {
  EXPECT_EQ(RequiredK(Mode::kConstant, 3), 2);
  EXPECT_EQ(RequiredK(Mode::kFinite, 5), 4);
  EXPECT_EQ(RequiredK(Mode::kConstrained, 6), 5);
  EXPECT_FALSE(RequiredK(Mode::kAgentDependent, 4).has_value());
  EXPECT_FALSE(WithinHypotheses(Mode::kConstant, 2));
  EXPECT_FALSE(WithinHypotheses(Mode::kFinite, 4));
  EXPECT_TRUE(WithinHypotheses(Mode::kConstrained, 6));
}

TEST(Membership, RoutesAndReports) {
  const ProblemInstance instance = RandomInstance(3, 1);
  const Trace trace = RunFromBall(instance, StepSizePolicy::Constant(0.1), 4, 1);
  MembershipParams params;
  const MembershipSummary s = SummarizeMembership(Measurements(trace), Mode::kConstant, params);
  EXPECT_EQ(s.status, Status::kUnique);
  EXPECT_EQ(s.required_k, 2);
  EXPECT_TRUE(s.within_hypotheses);
  EXPECT_THROW(SummarizeMembership(Measurements(trace), Mode::kConstrained, params),
               InvalidArgumentError);
}

TEST(Membership, StatusNamesRoundTrip) {
  for (Status s : {Status::kUnique, Status::kUniqueUpToScale, Status::kUnderdetermined,
                   Status::kInconsistent}) {
    EXPECT_EQ(ParseStatus(StatusName(s)), s);
  }
  EXPECT_THROW(ParseStatus("Maybe"), InvalidArgumentError);
}

TEST(ResultInvariants, HoldAcrossEstimatorsAndCounts) {
  const std::vector<double> values = {0.05, 0.1};
  const ReconstructOptions options;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const ProblemInstance instance = RandomInstance(4, seed);
    const Trace trace = RunFromBall(instance, StepSizePolicy::UniformFinite(values), 7, seed);
    const MeasurementSet ms = Measurements(trace);
    for (int count = 2; count <= 7; ++count) {
      const MeasurementSet w = ms.Window(0, count);
      ExpectResultInvariants(ReconstructFinitePoly(w, values), options.residual_tolerance);
      ExpectResultInvariants(ReconstructFiniteEnum(w, values), options.residual_tolerance);
      const ReconstructionResult p = ReconstructFinitePoly(w, values);
      if (p.status == Status::kUnderdetermined) EXPECT_GE(p.nullspace_dim, 2);
    }
  }
}

}  // namespace
}  // namespace gradrecon
