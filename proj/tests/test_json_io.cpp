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

#include <cmath>
#include <limits>

#include "doctest.h"
#include "qkdkit/json_io.hpp"
#include "qkdkit/random.hpp"
#include "random_states.hpp"

using namespace qkdkit;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const QkdError& e) {
    return e.kind();
  }
  FAIL("no error thrown");
  return ErrorKind::kParse;
}

}  // namespace

TEST_SUITE("json_io") {

TEST_CASE("operators round-trip exactly") {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix m = ginibre_matrix(3, 3, rng);
    const Json j = parse_json(dump_json(operator_to_json(m)));
    CHECK(operator_from_json(j) == m);
  }
  const Json bad = parse_json(R"({"dim": 2, "entries": [[1, 0], [0, 0], [0, 0]]})");
  CHECK(kind_of([&] { operator_from_json(bad); }) == ErrorKind::kParse);
  const Json not_density = parse_json(R"({"dim": 1, "entries": [[2, 0]]})");
  CHECK(kind_of([&] { density_from_json(not_density); }) == ErrorKind::kBadTrace);
}

TEST_CASE("key states round-trip with their evaluators") {
  Rng rng(4);
  testing_states::KeyStateShape shape;
  shape.asymmetric_blocks = true;
  for (int trial = 0; trial < 10; ++trial) {
    const KeyedCQState s = testing_states::random_key_state(rng, shape);
    const KeyedCQState back = keyed_state_from_json(parse_json(dump_json(keyed_state_to_json(s))));
    CHECK(back.dim_E() == s.dim_E());
    CHECK(back.blocks().size() == s.blocks().size());
    CHECK(security_epsilon(back) == doctest::Approx(security_epsilon(s)).epsilon(1e-12));
    CHECK(secrecy_epsilon(back) == doctest::Approx(secrecy_epsilon(s)).epsilon(1e-12));
  }
}

TEST_CASE("key state input errors") {
  const char* wrong_length = R"({"dim_E": 1, "blocks": [{"lA": 1, "lB": 1, "entries": [
      {"kA": "01", "kB": "01", "op": {"dim": 1, "entries": [[1, 0]]}}]}]})";
  CHECK(kind_of([&] { keyed_state_from_json(parse_json(wrong_length)); }) == ErrorKind::kInvalidState);
  const char* not_normalized = R"({"dim_E": 1, "blocks": [{"lA": 1, "lB": 1, "entries": [
      {"kA": "0", "kB": "0", "op": {"dim": 1, "entries": [[0.4, 0]]}}]}]})";
  CHECK(kind_of([&] { keyed_state_from_json(parse_json(not_normalized)); }) == ErrorKind::kBadTrace);
  const char* unknown = R"({"dim_E": 1, "blocks": [], "extra": 1})";
  CHECK(kind_of([&] { keyed_state_from_json(parse_json(unknown)); }) == ErrorKind::kBadConfig);
  CHECK(kind_of([] { parse_json("{\"dim_E\": "); }) == ErrorKind::kParse);
}

TEST_CASE("protocol configs and attacks round-trip") {
  ProtocolConfig c;
  c.n_rounds = 5;
  c.test_numerator = 2;
  c.test_denominator = 5;
  c.qber_abort_threshold = 0.11;
  c.key_length_rule.kind = KeyLengthRule::Kind::kFixed;
  c.key_length_rule.length = 2;
  c.seed = 77;
  c.bob_basis = BobBasis::kRandom;
  c.reconciliation = Reconciliation::kNone;
  const ProtocolConfig back = protocol_config_from_json(parse_json(dump_json(protocol_config_to_json(c))));
  CHECK(back.n_rounds == c.n_rounds);
  CHECK(back.test_numerator == 2);
  CHECK(back.test_denominator == 5);
  CHECK(back.qber_abort_threshold == c.qber_abort_threshold);
  CHECK(back.key_length_rule.kind == KeyLengthRule::Kind::kFixed);
  CHECK(back.key_length_rule.length == 2);
  CHECK(back.seed == 77);
  CHECK(back.bob_basis == BobBasis::kRandom);
  CHECK(back.reconciliation == Reconciliation::kNone);

  for (const AttackModel& a : {AttackModel::passive_depolarizing(0.25), AttackModel::intercept_resend('R'),
                               AttackModel::fixed_basis_guess("XZX"), AttackModel::block_all(),
                               AttackModel::entangling_probe(0.3)}) {
    const AttackModel b = attack_from_json(parse_json(dump_json(attack_to_json(a))));
    CHECK(b.name() == a.name());
    CHECK(b.p == a.p);
    CHECK(b.bases == a.bases);
    CHECK(b.theta == a.theta);
  }
}

TEST_CASE("config validation at the JSON boundary") {
  const auto cfg = [](const char* text) { return protocol_config_from_json(parse_json(text)); };
  CHECK(kind_of([&] { cfg(R"({"n_rounds": 3, "qber_abort_threshold": 0.1, "rounds": 2})"); }) == ErrorKind::kBadConfig);
  CHECK(kind_of([&] { cfg(R"({"n_rounds": 12, "qber_abort_threshold": 0.1})"); }) == ErrorKind::kBadConfig);
  CHECK(kind_of([&] { cfg(R"({"n_rounds": 3, "qber_abort_threshold": 0.1, "bob_basis": "sometimes"})"); }) ==
        ErrorKind::kBadConfig);
  const ProtocolConfig numeric = cfg(R"({"n_rounds": 3, "qber_abort_threshold": 0.1, "test_fraction": 0.5})");
  CHECK(numeric.test_numerator == 1);
  CHECK(numeric.test_denominator == 2);
  CHECK(kind_of([] { attack_from_json(parse_json(R"({"kind": "teleport"})")); }) == ErrorKind::kBadConfig);
}

TEST_CASE("dump_json number formatting") {
  Json j = Json::object();
  j["third"] = 1.0 / 3.0;
  j["one"] = 1.0;
  j["count"] = 3;
  j["inf"] = std::numeric_limits<double>::infinity();
  j["list"] = Json::array({1.5, 2.5});
  const std::string text = dump_json(j);
  CHECK(text.find("\"one\": 1.0") != std::string::npos);
  CHECK(text.find("\"count\": 3,\n") != std::string::npos);
  CHECK(text.find("\"inf\": null") != std::string::npos);
  CHECK(text.find("[1.5, 2.5]") != std::string::npos);
  CHECK(text.back() == '\n');
  CHECK(parse_json(text)["third"].get<double>() == 1.0 / 3.0);
  CHECK(dump_json(parse_json(text)) == text);
}

}  // TEST_SUITE
