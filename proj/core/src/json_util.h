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

#ifndef GRADRECON_SRC_JSON_UTIL_H_
#define GRADRECON_SRC_JSON_UTIL_H_

#include <string>
#include <string_view>

#include "gradrecon/qp.h"
#include "json.hpp"

namespace gradrecon::internal {

using Json = nlohmann::json;

// Deterministic text form: sorted keys, two-space indent, every double as
// "%.17g" (non-finite values become null).
std::string DumpJson(const Json& value);

Json ParseJson(std::string_view text);

Json MatrixToJson(const Matrix& m);
Json VectorToJson(const Vector& v);
Matrix MatrixFromJson(const Json& j);
Vector VectorFromJson(const Json& j);

}  // namespace gradrecon::internal

#endif  // GRADRECON_SRC_JSON_UTIL_H_
