// Copyright 2026 The qkdkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// JSON encoding of operators, key states, configurations and reports.
//
// Operators are {"dim": n, "entries": [[re, im], ...]} in row-major order.
// Reports are written by dump_json, which prints every double with 17
// significant digits so that a report round-trips exactly.

#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"
#include "qkdkit/compose.hpp"
#include "qkdkit/distinctness.hpp"
#include "qkdkit/keystates.hpp"
#include "qkdkit/protocol.hpp"

namespace qkdkit {

using Json = nlohmann::ordered_json;

/// Reads and parses a file; kParse on I/O or syntax errors.
Json read_json_file(const std::filesystem::path& path);
Json parse_json(const std::string& text);

/// Pretty-printed, two-space indent, doubles at 17 significant digits,
/// non-finite doubles as null. Ends with a newline.
std::string dump_json(const Json& j);

Matrix operator_from_json(const Json& j);
Json operator_to_json(const Matrix& m);
DensityOperator density_from_json(const Json& j, const Tolerances& tol = default_tolerances());

KeyedCQState keyed_state_from_json(const Json& j, const Tolerances& tol = default_tolerances());
Json keyed_state_to_json(const KeyedCQState& state);

ProtocolConfig protocol_config_from_json(const Json& j);
Json protocol_config_to_json(const ProtocolConfig& cfg);
AttackModel attack_from_json(const Json& j);
Json attack_to_json(const AttackModel& attack);

Json tolerances_to_json(const Tolerances& tol);
Json bounds_to_json(const DistinctnessBounds& b);
Json security_report_to_json(const SecurityReport& r);
Json conformance_report_to_json(const ConformanceReport& r);
Json run_artifacts_to_json(const RunArtifacts& a);
Json composition_report_to_json(const CompositionReport& r);
Json completeness_to_json(const CompletenessEstimate& e);

}  // namespace qkdkit
