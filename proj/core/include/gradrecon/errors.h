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

#ifndef GRADRECON_ERRORS_H_
#define GRADRECON_ERRORS_H_

#include <stdexcept>
#include <string>

namespace gradrecon {

// Precondition violations: bad dimensions, out-of-range parameters.
class InvalidArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A point at or beyond the boundary of {x | Cx < d}.
class InfeasiblePointError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class SingularMatrixError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SamplingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class BudgetExceededError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace gradrecon

#endif  // GRADRECON_ERRORS_H_
