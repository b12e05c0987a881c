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

#include "gradrecon/serialization.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "gradrecon/errors.h"
#include "json_util.h"

namespace gradrecon {
namespace internal {
namespace {

void DumpInto(const Json& value, int depth, std::string& out) {
  const std::string pad(2 * (depth + 1), ' ');
  const std::string close_pad(2 * depth, ' ');
  switch (value.type()) {
    case Json::value_t::object: {
      if (value.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = value.begin(); it != value.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out += pad;
        out += Json(it.key()).dump();
        out += ": ";
        DumpInto(it.value(), depth + 1, out);
      }
      out += "\n" + close_pad + "}";
      return;
    }
    case Json::value_t::array: {
      if (value.empty()) {
        out += "[]";
        return;
      }
      // Arrays of scalars stay on one line.
      const bool flat = std::all_of(value.begin(), value.end(), [](const Json& e) {
        return !e.is_object() && !e.is_array();
      });
      out += flat ? "[" : "[\n";
      bool first = true;
      for (const Json& e : value) {
        if (!first) out += flat ? ", " : ",\n";
        first = false;
        if (!flat) out += pad;
        DumpInto(e, depth + 1, out);
      }
      out += flat ? "]" : "\n" + close_pad + "]";
      return;
    }
    case Json::value_t::number_float: {
      const double v = value.get<double>();
      out += std::isfinite(v) ? FormatDouble(v) : "null";
      return;
    }
    default:
      out += value.dump();
  }
}

}  // namespace

std::string DumpJson(const Json& value) {
  std::string out;
  DumpInto(value, 0, out);
  out += "\n";
  return out;
}

Json ParseJson(std::string_view text) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    throw InvalidArgumentError(std::string("malformed JSON: ") + e.what());
  }
}

Json MatrixToJson(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json VectorToJson(const Vector& v) {
  Json arr = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

Matrix MatrixFromJson(const Json& j) {
  if (!j.is_array() || j.empty()) {
    throw InvalidArgumentError("matrix must be a nonempty array of rows");
  }
  const std::size_t rows = j.size();
  const std::size_t cols = j[0].size();
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    if (!j[i].is_array() || j[i].size() != cols) {
      throw InvalidArgumentError("matrix rows must have equal length");
    }
    for (std::size_t k = 0; k < cols; ++k) m(i, k) = j[i][k].get<double>();
  }
  return m;
}

Vector VectorFromJson(const Json& j) {
  if (!j.is_array()) throw InvalidArgumentError("vector must be an array");
  Vector v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v(i) = j[i].get<double>();
  return v;
}

}  // namespace internal

using internal::Json;

std::string FormatDouble(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

std::string InstanceToJson(const ProblemInstance& instance) {
  Json j;
  j["n"] = instance.dim();
  j["Q"] = internal::MatrixToJson(instance.utility().Q());
  j["q"] = internal::VectorToJson(instance.utility().q());
  if (instance.constrained()) {
    j["C"] = internal::MatrixToJson(instance.constraints()->C());
    j["d"] = internal::VectorToJson(instance.constraints()->d());
    j["lambda"] = *instance.barrier_weight();
  }
  return internal::DumpJson(j);
}

ProblemInstance InstanceFromJson(std::string_view text) {
  const Json j = internal::ParseJson(text);
  try {
    QuadraticUtility utility(internal::MatrixFromJson(j.at("Q")),
                             internal::VectorFromJson(j.at("q")));
    if (j.contains("n") && j.at("n").get<int>() != utility.dim()) {
      throw InvalidArgumentError("field n does not match Q and q");
    }
    const bool has_c = j.contains("C") && !j.at("C").is_null();
    const bool has_lambda = j.contains("lambda") && !j.at("lambda").is_null();
    if (has_c != has_lambda) {
      throw InvalidArgumentError("C, d and lambda must appear together");
    }
    if (!has_c) return ProblemInstance(std::move(utility));
    return ProblemInstance(std::move(utility),
                           ConstraintSet(internal::MatrixFromJson(j.at("C")),
                                         internal::VectorFromJson(j.at("d"))),
                           j.at("lambda").get<double>());
  } catch (const Json::exception& e) {
    throw InvalidArgumentError(std::string("bad instance JSON: ") + e.what());
  }
}

ConstraintSet ConstraintsFromJson(std::string_view text) {
  const Json j = internal::ParseJson(text);
  try {
    return ConstraintSet(internal::MatrixFromJson(j.at("C")),
                         internal::VectorFromJson(j.at("d")));
  } catch (const Json::exception& e) {
    throw InvalidArgumentError(std::string("bad constraint JSON: ") + e.what());
  }
}

namespace {

Json PolicyJson(const StepSizePolicy& policy) {
  Json j;
  j["type"] = std::string(policy.type_name());
  if (const auto* c = std::get_if<ConstantStep>(&policy.variant())) {
    j["alpha"] = c->alpha;
  } else if (const auto* d = std::get_if<DiminishingStep>(&policy.variant())) {
    j["c"] = d->c;
    j["delta"] = d->delta;
  } else {
    j["values"] = policy.finite_values();
  }
  return j;
}

std::vector<double> DoublesFromJson(const Json& j) {
  return j.get<std::vector<double>>();
}

}  // namespace

std::string PolicyToJson(const StepSizePolicy& policy) {
  return internal::DumpJson(PolicyJson(policy));
}

StepSizePolicy PolicyFromJson(std::string_view text) {
  const Json j = internal::ParseJson(text);
  try {
    const std::string type = j.at("type").get<std::string>();
    if (type == "constant") return StepSizePolicy::Constant(j.at("alpha").get<double>());
    if (type == "diminishing") {
      return StepSizePolicy::Diminishing(j.at("c").get<double>(),
                                         j.at("delta").get<double>());
    }
    if (type == "uniform_finite") {
      return StepSizePolicy::UniformFinite(DoublesFromJson(j.at("values")));
    }
    if (type == "agent_dependent") {
      return StepSizePolicy::AgentDependent(DoublesFromJson(j.at("values")));
    }
    throw InvalidArgumentError("unknown policy type: " + type);
  } catch (const Json::exception& e) {
    throw InvalidArgumentError(std::string("bad policy JSON: ") + e.what());
  }
}

std::string ResultToJson(const ReconstructionResult& result) {
  Json j;
  j["status"] = std::string(StatusName(result.status));
  j["Q_hat"] = result.quadratic_hat ? internal::MatrixToJson(*result.quadratic_hat)
                                    : Json(nullptr);
  j["q_hat"] = result.linear_hat ? internal::VectorToJson(*result.linear_hat)
                                 : Json(nullptr);
  j["lambda_hat"] = result.lambda_hat ? Json(*result.lambda_hat) : Json(nullptr);
  j["gamma_hat"] = result.gamma_hat ? Json(*result.gamma_hat) : Json(nullptr);
  j["nullspace_dim"] = result.nullspace_dim;
  j["residual"] = result.residual;
  return internal::DumpJson(j);
}

ReconstructionResult ResultFromJson(std::string_view text) {
  const Json j = internal::ParseJson(text);
  try {
    ReconstructionResult r;
    r.status = ParseStatus(j.at("status").get<std::string>());
    if (!j.at("Q_hat").is_null()) r.quadratic_hat = internal::MatrixFromJson(j.at("Q_hat"));
    if (!j.at("q_hat").is_null()) r.linear_hat = internal::VectorFromJson(j.at("q_hat"));
    if (!j.at("lambda_hat").is_null()) r.lambda_hat = j.at("lambda_hat").get<double>();
    if (!j.at("gamma_hat").is_null()) r.gamma_hat = j.at("gamma_hat").get<double>();
    r.nullspace_dim = j.at("nullspace_dim").get<int>();
    r.residual = j.at("residual").is_null() ? 0.0 : j.at("residual").get<double>();
    return r;
  } catch (const Json::exception& e) {
    throw InvalidArgumentError(std::string("bad result JSON: ") + e.what());
  }
}

void WriteTraceCsv(const Trace& trace, std::ostream& out) {
  const int n = trace.dim();
  out << "k";
  for (int i = 1; i <= n; ++i) out << ",x_" << i;
  out << "\n";
  for (int k = 0; k <= trace.horizon(); ++k) {
    out << k;
    for (int i = 0; i < n; ++i) out << "," << FormatDouble(trace.x(k)(i));
    out << "\n";
  }
}

std::string TraceSidecarJson(const Trace& trace, bool expose_steps) {
  Json j;
  j["instance"] = internal::ParseJson(InstanceToJson(trace.instance()));
  j["policy"] = PolicyJson(trace.policy());
  j["seed"] = trace.seed();
  j["trial"] = trace.trial();
  j["horizon"] = trace.horizon();
  if (expose_steps) {
    Json steps = Json::array();
    for (int k = 0; k < trace.hidden_steps().size(); ++k) {
      steps.push_back(internal::VectorToJson(trace.hidden_steps().diagonal(k)));
    }
    j["steps"] = std::move(steps);
  }
  return internal::DumpJson(j);
}

void WriteMeasurementsCsv(const MeasurementSet& ms, std::ostream& out) {
  const int n = ms.dim();
  out << "t";
  for (int i = 1; i <= n; ++i) out << ",x_" << i;
  for (int i = 1; i <= n; ++i) out << ",y_" << i;
  out << "\n";
  for (int t = 0; t < ms.size(); ++t) {
    out << ms.index(t);
    for (int i = 0; i < n; ++i) out << "," << FormatDouble(ms.x(t)(i));
    for (int i = 0; i < n; ++i) out << "," << FormatDouble(ms.y(t)(i));
    out << "\n";
  }
}

MeasurementSet ReadMeasurementsCsv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw InvalidArgumentError("empty measurement CSV");
  const auto columns = std::count(line.begin(), line.end(), ',');
  if (columns < 2 || columns % 2 != 0) {
    throw InvalidArgumentError("measurement CSV header must be t,x_1..x_n,y_1..y_n");
  }
  const int n = static_cast<int>(columns / 2);
  std::vector<Vector> xs;
  std::vector<Vector> ys;
  long first_index = 0;
  long expected = -1;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string cell;
    std::vector<double> values;
    while (std::getline(row, cell, ',')) {
      try {
        values.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw InvalidArgumentError("non-numeric cell in measurement CSV: " + cell);
      }
    }
    if (values.size() != static_cast<std::size_t>(2 * n + 1)) {
      throw InvalidArgumentError("measurement CSV row has wrong column count");
    }
    const long t = static_cast<long>(values[0]);
    if (expected < 0) {
      first_index = t;
    } else if (t != expected) {
      throw InvalidArgumentError("measurement indices must be consecutive");
    }
    expected = t + 1;
    xs.push_back(Eigen::Map<Vector>(values.data() + 1, n));
    ys.push_back(Eigen::Map<Vector>(values.data() + 1 + n, n));
  }
  return MeasurementSet(std::move(xs), std::move(ys), first_index);
}

}  // namespace gradrecon
