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

#ifndef GRADRECON_SERIALIZATION_H_
#define GRADRECON_SERIALIZATION_H_

#include <iosfwd>
#include <string>
#include <string_view>

#include "gradrecon/qp.h"
#include "gradrecon/reconstruct.h"
#include "gradrecon/step_policy.h"
#include "gradrecon/trajectory.h"

namespace gradrecon {

// 17 significant digits, enough to round-trip any double.
std::string FormatDouble(double value);

// {"n":..., "Q":[[...]], "q":[...], "C":[[...]], "d":[...], "lambda":...};
// the last three only for constrained instances. Matrices are row-major.
std::string InstanceToJson(const ProblemInstance& instance);
ProblemInstance InstanceFromJson(std::string_view text);

// Reads only "C" and "d" from an instance-shaped document.
ConstraintSet ConstraintsFromJson(std::string_view text);

// {"type":"constant","alpha":...} | {"type":"diminishing","c":...,"delta":...}
// | {"type":"uniform_finite","values":[...]}
// | {"type":"agent_dependent","values":[...]}
std::string PolicyToJson(const StepSizePolicy& policy);
StepSizePolicy PolicyFromJson(std::string_view text);

// {"status":..., "Q_hat":[[...]], "q_hat":[...], "lambda_hat":...,
//  "gamma_hat":..., "nullspace_dim":..., "residual":...}; absent -> null.
std::string ResultToJson(const ReconstructionResult& result);
ReconstructionResult ResultFromJson(std::string_view text);

// Header "k,x_1,...,x_n", one row per iterate.
void WriteTraceCsv(const Trace& trace, std::ostream& out);

// Instance, policy, seed, trial and horizon; the realized step diagonals are
// included only when expose_steps is set.
std::string TraceSidecarJson(const Trace& trace, bool expose_steps);

// Header "t,x_1,...,x_n,y_1,...,y_n" with absolute iteration index t.
void WriteMeasurementsCsv(const MeasurementSet& ms, std::ostream& out);
MeasurementSet ReadMeasurementsCsv(std::istream& in);

}  // namespace gradrecon

#endif  // GRADRECON_SERIALIZATION_H_
