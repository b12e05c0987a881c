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
#include <cmath>
#include <functional>

#include <gtest/gtest.h>

#include "gradrecon/errors.h"
#include "test_support.h"

namespace gradrecon {
namespace {

ProblemInstance OneDimensional() {
  return ProblemInstance(QuadraticUtility(Matrix::Constant(1, 1, 2.0), Vector::Constant(1, 1.0)));
}

Trace HandTrace() {
  return gradrecon::Run(OneDimensional(), StepSizePolicy::Constant(0.1), Vector::Zero(1), 2,
             CounterStream(0, 0));
}

TEST(Run, OneDimensionalHandIteration) {
  const Trace trace = HandTrace();
  ASSERT_EQ(trace.horizon(), 2);
  EXPECT_EQ(trace.x(0)(0), 0.0);
  EXPECT_NEAR(trace.x(1)(0), -0.1, 1e-15);
  EXPECT_NEAR(trace.x(2)(0), -0.18, 1e-15);
}

TEST(Run, OptimumIsFixedPoint) {
  const ProblemInstance instance = testing::RandomInstance(4, 8);
  const Vector opt = Optimum(instance.utility());
  const Trace trace = gradrecon::Run(instance, StepSizePolicy::Constant(0.05), opt, 20, CounterStream(1, 0));
  for (const Vector& x : trace.iterates()) EXPECT_LE((x - opt).norm(), 1e-12);
}

TEST(Run, ValidatedPolicyConverges) {
  const ProblemInstance instance = testing::RandomInstance(3, 21, 1.0, 2.0);
  const WolfeBounds b = ComputeWolfeBounds(instance.utility().Q(), 0.25, 0.5);
  const auto policy = StepSizePolicy::UniformFinite({0.7 * b.c1_min + 0.3 * b.c2_max,
                                                     0.3 * b.c1_min + 0.7 * b.c2_max});
  ASSERT_TRUE(ValidatePolicy(policy, instance.utility().Q(), 0.25, 0.5).valid);
  const Trace trace = testing::RunFromBall(instance, policy, 10000, 21);
  const Vector opt = Optimum(instance.utility());
  EXPECT_LE((trace.x(10000) - opt).norm(), 1e-6 * (1.0 + opt.norm()));
}

TEST(Run, RejectsInfeasibleStart) {
  const QuadraticUtility u(Matrix::Identity(1, 1), Vector::Zero(1));
  const ProblemInstance instance(u, ConstraintSet(Matrix::Ones(1, 1), Vector::Ones(1)), 0.1);
  EXPECT_THROW(gradrecon::Run(instance, StepSizePolicy::Constant(0.1), Vector::Constant(1, 1.0), 3,
                   CounterStream(0, 0)),
               InfeasiblePointError);
}

TEST(Run, ReportsTrajectoryLeavingDomain) {
  // A large step overshoots the barrier wall.
  const QuadraticUtility u(Matrix::Identity(1, 1), Vector::Constant(1, -5.0));
  const ProblemInstance instance(u, ConstraintSet(Matrix::Ones(1, 1), Vector::Ones(1)), 0.01);
  EXPECT_THROW(gradrecon::Run(instance, StepSizePolicy::Constant(1.0), Vector::Zero(1), 5,
                   CounterStream(0, 0)),
               InfeasiblePointError);
}

TEST(Run, UpdateIdentityHolds) {
  const auto policies = {StepSizePolicy::Constant(0.02), StepSizePolicy::Diminishing(0.05, 0.7),
                         StepSizePolicy::UniformFinite({0.01, 0.02}),
                         StepSizePolicy::AgentDependent({0.005, 0.01, 0.02})};
  for (const StepSizePolicy& policy : policies) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const ProblemInstance instance = seed % 2 ? testing::RandomInstance(4, seed)
                                                : testing::RandomConstrainedInstance(4, seed, 0.3);
      const Trace trace = testing::RunFromBall(instance, policy, 40, seed);
      for (int k = 0; k < trace.horizon(); ++k) {
        const Vector step =
            trace.hidden_steps().diagonal(k).cwiseProduct(DescentDirection(instance, trace.x(k)));
        EXPECT_LE(((trace.x(k) - trace.x(k + 1)) - step).norm(),
                  1e-12 * (1.0 + trace.x(k).norm()));
        if (instance.constrained()) {
          EXPECT_TRUE(instance.constraints()->StrictlyFeasible(trace.x(k + 1)));
        }
      }
    }
  }
}

TEST(Measurements, HandTraceDifferences) {
  const MeasurementSet ms = Measurements(HandTrace());
  ASSERT_EQ(ms.size(), 2);
  EXPECT_NEAR(ms.y(0)(0), 0.1, 1e-15);
  EXPECT_NEAR(ms.y(1)(0), 0.08, 1e-15);
}

TEST(Measurements, FixedPointHasZeroDifferences) {
  const ProblemInstance instance = testing::RandomInstance(3, 2);
  const Trace trace = gradrecon::Run(instance, StepSizePolicy::Constant(0.1), Optimum(instance.utility()),
                          5, CounterStream(0, 0));
  for (int t = 0; t < 5; ++t) EXPECT_LE(Measurements(trace).y(t).norm(), 1e-14);
}

TEST(Measurements, TelescopeBackToIterates) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Trace trace = testing::RunFromBall(testing::RandomInstance(5, seed),
                                             StepSizePolicy::AgentDependent({0.03, 0.09}), 30, seed);
    const MeasurementSet ms = Measurements(trace);
    for (int k = 0; k < ms.size(); ++k) {
      EXPECT_EQ(ms.y(k), trace.x(k) - trace.x(k + 1));
      EXPECT_EQ(ms.x(k) - ms.y(k), trace.x(k + 1));
    }
    const std::vector<Vector> chain = ms.ChainFromFirst();
    for (int k = 0; k <= ms.size(); ++k) {
      EXPECT_LE((chain[k] - trace.x(k)).norm(), 1e-12 * (1.0 + trace.x(k).norm()));
    }
  }
}

TEST(Measurements, WindowKeepsAbsoluteIndices) {
  const Trace trace = testing::RunFromBall(testing::RandomInstance(2, 1),
                                           StepSizePolicy::Constant(0.1), 10, 1);
  const MeasurementSet w = Measurements(trace).Window(3, 4);
  EXPECT_EQ(w.size(), 4);
  EXPECT_EQ(w.index(0), 3);
  EXPECT_EQ(w.x(0), trace.x(3));
  EXPECT_THROW(Measurements(trace).Window(8, 4), InvalidArgumentError);
}

TEST(CheckIndependence, EigenvectorStartIsDegenerate) {
  const ProblemInstance instance(QuadraticUtility(Matrix::Identity(3, 3), Vector::Zero(3)));
  const Trace trace = gradrecon::Run(instance, StepSizePolicy::Constant(0.1), Vector::Unit(3, 0), 4,
                          CounterStream(0, 0));
  const RankReport r = CheckIndependence(trace, 2);
  EXPECT_EQ(r.rank, 1);
  EXPECT_FALSE(r.holds);
}

TEST(CheckIndependence, SingleNonzeroPointHolds) {
  const Trace trace = testing::RunFromBall(testing::RandomInstance(4, 3),
                                           StepSizePolicy::Constant(0.1), 3, 3);
  EXPECT_TRUE(CheckIndependence(trace, 1).holds);
}

void ExpectIndependenceRate(const std::function<ProblemInstance(int, std::uint64_t)>& make,
                            const StepSizePolicy& policy) {
  for (int n = 3; n <= 8; ++n) {
    int holds = 0;
    for (std::uint64_t trial = 0; trial < 100; ++trial) {
      const ProblemInstance instance = make(n, trial);
      const Trace trace = testing::RunFromBall(instance, policy, n, trial);
      holds += CheckIndependence(trace, n).holds ? 1 : 0;
    }
    EXPECT_GE(holds, 99) << "n=" << n;
  }
}

TEST(CheckIndependence, ConstantStepIteratesAreIndependent) {
  ExpectIndependenceRate([](int n, std::uint64_t s) { return testing::RandomInstance(n, s); },
                         StepSizePolicy::Constant(0.1));
}

TEST(CheckIndependence, FiniteStepIteratesAreIndependent) {
  ExpectIndependenceRate([](int n, std::uint64_t s) { return testing::RandomInstance(n, s); },
                         StepSizePolicy::UniformFinite({0.05, 0.1}));
}

TEST(CheckIndependence, BarrierIteratesAreIndependent) {
  ExpectIndependenceRate(
      [](int n, std::uint64_t s) { return testing::RandomConstrainedInstance(n, s, 0.5); },
      StepSizePolicy::UniformFinite({0.02, 0.05}));
}

TEST(ConvergenceMetrics, HandTraceDistances) {
  const std::vector<double> d = ConvergenceMetrics(HandTrace());
  ASSERT_EQ(d.size(), 3u);
  EXPECT_NEAR(d[0], 0.5, 1e-15);
  EXPECT_NEAR(d[1], 0.4, 1e-15);
  EXPECT_NEAR(d[2], 0.32, 1e-15);
}

TEST(ConvergenceMetrics, FixedPointIsZero) {
  const ProblemInstance instance = testing::RandomInstance(3, 5);
  const Trace trace = gradrecon::Run(instance, StepSizePolicy::Constant(0.1), Optimum(instance.utility()),
                          4, CounterStream(0, 0));
  for (double d : ConvergenceMetrics(trace)) EXPECT_LE(d, 1e-14);
}

TEST(ConvergenceMetrics, ValidatedTraceStaysUnderGeometricEnvelope) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const ProblemInstance instance = testing::RandomInstance(4, seed, 1.0, 2.0);
    const WolfeBounds b = ComputeWolfeBounds(instance.utility().Q(), 0.25, 0.5);
    const double lo = b.c1_min + 0.1 * (b.c2_max - b.c1_min);
    const double hi = b.c1_min + 0.9 * (b.c2_max - b.c1_min);
    const Trace trace =
        testing::RunFromBall(instance, StepSizePolicy::UniformFinite({lo, hi}), 200, seed);
    // Shared scalar steps: |I - aQ| = max |1 - a lambda| over the spectrum.
    const Vector eig = instance.utility().Eigenvalues();
    double rate = 0.0;
    for (double a : {lo, hi}) {
      rate = std::max({rate, std::abs(1 - a * eig.minCoeff()), std::abs(1 - a * eig.maxCoeff())});
    }
    ASSERT_LT(rate, 1.0);
    const std::vector<double> d = ConvergenceMetrics(trace);
    EXPECT_LE(d.back(), d.front());
    for (std::size_t k = 1; k < d.size(); ++k) {
      EXPECT_LE(d[k], std::pow(rate, k) * d[0] * (1 + 1e-9) + 1e-15) << "k=" << k;
    }
  }
}

}  // namespace
}  // namespace gradrecon
