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
#include <map>

#include "doctest.h"
#include "qkdkit/critique.hpp"
#include "qkdkit/keystates.hpp"
#include "qkdkit/random.hpp"
#include "random_states.hpp"

using namespace qkdkit;

namespace {

Matrix scalar(double v) { return Matrix::Constant(1, 1, v); }

// l = 1 keys with trivial Eve, both keys deterministically 0.
KeyedCQState deterministic_keys() {
  KeyedCQStateBuilder b(1);
  b.add({1, 1}, 0, 0, scalar(1.0));
  return b.build();
}

KeyedCQState abort_only(Eigen::Index dim_E = 2) {
  KeyedCQStateBuilder b(dim_E);
  b.add({0, 0}, 0, 0, Matrix::Identity(dim_E, dim_E) / double(dim_E), "t");
  return b.build();
}

// Uniform l = 1 key copied into a classical Eve register of dimension 2.
KeyedCQState eve_copy() {
  KeyedCQStateBuilder b(2);
  for (std::uint32_t k = 0; k < 2; ++k) {
    Matrix e = Matrix::Zero(2, 2);
    e(k, k) = 0.5;
    b.add({1, 1}, k, k, e);
  }
  return b.build();
}

double entry_distance(const KeyedCQState& a, const KeyedCQState& b) {
  // Sum of per-entry trace norms of the difference, over the union of indices.
  double d = 0.0;
  std::map<std::pair<KeyLengthPair, EntryIndex>, Matrix> diff;
  for (const auto& [l, block] : a.blocks()) {
    for (const auto& [idx, op] : block) diff.emplace(std::make_pair(l, idx), op);
  }
  for (const auto& [l, block] : b.blocks()) {
    for (const auto& [idx, op] : block) {
      auto [it, inserted] = diff.try_emplace(std::make_pair(l, idx), -op);
      if (!inserted) it->second -= op;
    }
  }
  for (const auto& [k, m] : diff) d += hermitian_trace_norm(m);
  return d;
}

}  // namespace

TEST_SUITE("keystates") {

TEST_CASE("bitstrings") {
  CHECK(to_bitstring(2, 3) == "010");
  CHECK(parse_bitstring("010") == std::make_pair(2u, 3u));
  CHECK(parse_bitstring("") == std::make_pair(0u, 0u));
  CHECK_THROWS_AS(parse_bitstring("012"), QkdError);
}

TEST_CASE("builder validation") {
  KeyedCQStateBuilder bad_pair(1);
  bad_pair.add({1, 2}, 0, 0, scalar(1.0));
  CHECK_THROWS_AS(bad_pair.build(), QkdError);

  KeyedCQStateBuilder out_of_range(1);
  out_of_range.add({1, 1}, 2, 0, scalar(1.0));
  CHECK_THROWS_AS(out_of_range.build(), QkdError);

  KeyedCQStateBuilder light(1);
  light.add({1, 1}, 0, 0, scalar(0.5));
  try {
    light.build();
    FAIL("expected BadTrace");
  } catch (const QkdError& e) {
    CHECK(e.kind() == ErrorKind::kBadTrace);
  }
  CHECK_THROWS_AS(KeyedCQStateBuilder(kMaxEveDim + 1), QkdError);
}

TEST_CASE("key_replacer examples") {
  const KeyedCQState ideal = key_replacer(deterministic_keys());
  const KeyBlock& block = ideal.blocks().at({1, 1});
  REQUIRE(block.size() == 2);
  CHECK(block.at({0, 0, ""})(0, 0).real() == doctest::Approx(0.5));
  CHECK(block.at({1, 1, ""})(0, 0).real() == doctest::Approx(0.5));

  CHECK(entry_distance(key_replacer(ideal), ideal) <= 1e-12);
  const KeyedCQState aborted = abort_only();
  CHECK(entry_distance(key_replacer(aborted), aborted) <= 1e-12);
}

TEST_CASE("key_replacer is idempotent, trace preserving and keeps Eve's marginals") {
  Rng rng(31);
  testing_states::KeyStateShape shape;
  shape.asymmetric_blocks = true;
  for (int trial = 0; trial < 50; ++trial) {
    const KeyedCQState s = testing_states::random_key_state(rng, shape);
    const KeyedCQState r = key_replacer(s);
    CHECK(r.total_trace() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(entry_distance(key_replacer(r), r) <= 1e-12);
    for (const auto& [lengths, block] : s.blocks()) {
      CHECK(r.block_weight(lengths) == doctest::Approx(s.block_weight(lengths)).epsilon(1e-12));
      std::map<std::string, Matrix> before, after;
      for (const auto& [idx, op] : block) {
        before.try_emplace(idx.eve, Matrix::Zero(s.dim_E(), s.dim_E())).first->second += op;
      }
      for (const auto& [idx, op] : r.blocks().at(lengths)) {
        after.try_emplace(idx.eve, Matrix::Zero(s.dim_E(), s.dim_E())).first->second += op;
      }
      for (const auto& [label, op] : before) CHECK((after.at(label) - op).norm() <= 1e-12);
    }
    // security_epsilon is exactly the distance to the replaced state.
    CHECK(security_epsilon(s) == doctest::Approx(entry_distance(s, r)).epsilon(1e-10));
    CHECK(security_epsilon(r) <= 1e-12);
  }
}

TEST_CASE("security_epsilon examples") {
  CHECK(security_epsilon(key_replacer(deterministic_keys())) <= 1e-15);
  CHECK(security_epsilon(deterministic_keys()) == doctest::Approx(1.0));
  CHECK(security_epsilon(abort_only()) == 0.0);
}

TEST_CASE("correctness and mismatch examples") {
  CHECK(correctness_epsilon(eve_copy()) == 0.0);
  CHECK(mismatch_probability(eve_copy()) == 0.0);

  KeyedCQStateBuilder indep(1);
  for (std::uint32_t a = 0; a < 2; ++a) {
    for (std::uint32_t b = 0; b < 2; ++b) indep.add({1, 1}, a, b, scalar(0.25));
  }
  const KeyedCQState s = indep.build();
  CHECK(mismatch_probability(s) == doctest::Approx(0.5));
  CHECK(correctness_epsilon(s) == doctest::Approx(1.0));

  KeyedCQStateBuilder asym(1);
  asym.add({1, 0}, 1, 0, scalar(0.5));
  asym.add({1, 1}, 0, 0, scalar(0.5));
  CHECK(mismatch_probability(asym.build()) == 0.0);
  CHECK(correctness_epsilon(asym.build()) == 0.0);
}

TEST_CASE("correctness is twice the mismatch probability") {
  Rng rng(32);
  for (int trial = 0; trial < 100; ++trial) {
    const KeyedCQState s = testing_states::random_joint_distribution(rng, 1 + trial % 4);
    CHECK(std::abs(correctness_epsilon(s) - 2 * mismatch_probability(s)) <= 1e-12);
  }
  testing_states::KeyStateShape shape;
  shape.asymmetric_blocks = true;
  for (int trial = 0; trial < 50; ++trial) {
    const KeyedCQState s = testing_states::random_key_state(rng, shape);
    CHECK(std::abs(correctness_epsilon(s) - 2 * mismatch_probability(s)) <= 1e-12);
  }
}

TEST_CASE("secrecy examples") {
  CHECK(secrecy_epsilon(key_replacer(deterministic_keys())) <= 1e-15);
  CHECK(secrecy_epsilon(eve_copy()) == doctest::Approx(1.0));
  CHECK(correctness_epsilon(eve_copy()) == 0.0);
  CHECK(secrecy_epsilon(abort_only()) == 0.0);
  const auto terms = secrecy_terms(eve_copy());
  CHECK(terms.at(1) == doctest::Approx(1.0));
}

TEST_CASE("fixed_length_secrecy") {
  // Pr[Omega] = 0: only the abort block carries weight.
  KeyedCQStateBuilder none(1);
  none.add({0, 0}, 0, 0, scalar(1.0));
  none.add({2, 2}, 1, 1, scalar(0.0));
  CHECK(fixed_length_secrecy(none.build(), 2) == 0.0);

  // Eve knows the key, accepted with probability 2^-n.
  for (std::uint32_t n : {1u, 3u, 5u}) {
    for (std::uint32_t L : {1u, 2u}) {
      const double pr = std::ldexp(1.0, -static_cast<int>(n));
      const std::uint32_t keys = 1u << L;
      KeyedCQStateBuilder b(keys);
      b.add({0, 0}, 0, 0, Matrix::Identity(keys, keys) * (1.0 - pr) / keys);
      for (std::uint32_t k = 0; k < keys; ++k) {
        Matrix e = Matrix::Zero(keys, keys);
        e(k, k) = pr / keys;
        b.add({L, L}, k, k, e);
      }
      const KeyedCQState s = b.build();
      // Classical enumeration: |p(k,e) - p(e)/2^L| summed over k and e.
      double expected = 0.0;
      for (std::uint32_t k = 0; k < keys; ++k) {
        for (std::uint32_t e = 0; e < keys; ++e) {
          const double joint = k == e ? pr / keys : 0.0;
          expected += std::abs(joint - (pr / keys) / keys);
        }
      }
      CHECK(fixed_length_secrecy(s, L) == doctest::Approx(expected).epsilon(1e-12));
      CHECK(fixed_length_secrecy(s, L) == doctest::Approx(pr * 2 * (1 - 1.0 / keys)).epsilon(1e-12));
      CHECK(std::abs(fixed_length_secrecy(s, L) - secrecy_epsilon(s)) <= 1e-12);
    }
  }

  CHECK(fixed_length_secrecy(key_replacer(eve_copy()), 1) <= 1e-15);

  KeyedCQStateBuilder mixed(1);
  mixed.add({1, 1}, 0, 0, scalar(0.5));
  mixed.add({2, 2}, 0, 0, scalar(0.5));
  try {
    fixed_length_secrecy(mixed.build(), 1);
    FAIL("expected UnsupportedLengths");
  } catch (const QkdError& e) {
    CHECK(e.kind() == ErrorKind::kUnsupportedLengths);
  }
}

TEST_CASE("fixed_length_secrecy agrees with secrecy_epsilon on two-length states") {
  Rng rng(33);
  int checked = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const std::uint32_t L = 1 + trial % 3;
    const KeyedCQState full = testing_states::random_key_state(rng, {L, 4, true, false});
    // Keep the blocks where Alice's length is 0 or L and renormalize.
    double kept = 0.0;
    for (const auto& [lengths, block] : full.blocks()) {
      if (lengths.lA == 0 || lengths.lA == L) kept += full.block_weight(lengths);
    }
    KeyedCQStateBuilder b(full.dim_E());
    for (const auto& [lengths, block] : full.blocks()) {
      if (lengths.lA != 0 && lengths.lA != L) continue;
      for (const auto& [idx, op] : block) b.add(lengths, idx.kA, idx.kB, op / kept, idx.eve);
    }
    const KeyedCQState s = b.build();
    CHECK(std::abs(fixed_length_secrecy(s, L) - secrecy_epsilon(s)) <= 1e-12);
    ++checked;
  }
  CHECK(checked == 50);
}

TEST_CASE("security from secrecy and correctness on symmetric-abort states") {
  Rng rng(34);
  for (int trial = 0; trial < 100; ++trial) {
    const KeyedCQState s = testing_states::random_key_state(rng);
    CHECK(security_epsilon(s) <= combine_parts(correctness_epsilon(s), secrecy_epsilon(s)) + 1e-10);
  }
}

TEST_CASE("security from parts does not extend to asymmetric aborts") {
  // Alice alone holds key 0 with weight p; both hold 1 with weight p. Alice's
  // key is uniform and independent of Eve, correctness ignores the
  // asymmetric block, yet the real state is far from ideal.
  const double p = 0.5;
  KeyedCQStateBuilder b(1);
  b.add({1, 0}, 0, 0, scalar(p));
  b.add({1, 1}, 1, 1, scalar(p));
  const KeyedCQState s = b.build();
  CHECK(secrecy_epsilon(s) == doctest::Approx(0.0));
  CHECK(correctness_epsilon(s) == 0.0);
  CHECK(security_epsilon(s) == doctest::Approx(2 * p));
}

TEST_CASE("security is zero exactly on fixed points of the replacer") {
  Rng rng(35);
  for (int trial = 0; trial < 30; ++trial) {
    const KeyedCQState s = testing_states::random_key_state(rng, {2, 4, true, false});
    const bool fixed = entry_distance(s, key_replacer(s)) <= 1e-10;
    CHECK((security_epsilon(s) <= 1e-10) == fixed);
    CHECK(security_epsilon(key_replacer(s)) <= 1e-10);
  }
}

TEST_CASE("secrecy does not grow under channels on Eve's system") {
  Rng rng(36);
  for (int trial = 0; trial < 30; ++trial) {
    const KeyedCQState s = testing_states::random_key_state(rng, {2, 4, true, false});
    const Eigen::Index d = s.dim_E();
    const Eigen::Index d_out = 1 + static_cast<Eigen::Index>(uniform_index(rng, 0, 3));
    const KrausChannel ch = random_channel(d, d_out, (d + d_out - 1) / d_out + 1, rng);
    KeyedCQStateBuilder b(d_out);
    for (const auto& [lengths, block] : s.blocks()) {
      for (const auto& [idx, op] : block) b.add(lengths, idx.kA, idx.kB, apply_kraus(ch.kraus_ops(), op), idx.eve);
    }
    CHECK(secrecy_epsilon(b.build()) <= secrecy_epsilon(s) + 1e-10);
  }
}

TEST_CASE("combine_parts and evaluate") {
  CHECK(combine_parts(0, 0) == 0.0);
  CHECK(combine_parts(0.1, 0.2) == doctest::Approx(0.3));
  CHECK(combine_parts(1.5, 1.5) == 2.0);
  const SecurityReport r = evaluate(eve_copy());
  CHECK(r.epsilon_secrecy_alice == doctest::Approx(1.0));
  CHECK(r.epsilon_correctness == 0.0);
  CHECK(r.acceptance_probability == doctest::Approx(1.0));
  CHECK(evaluate(abort_only()).acceptance_probability == 0.0);
}

TEST_CASE("per-key-value criterion and its counterexample") {
  const std::vector<double> uniform(8, 0.125);
  CHECK(yuen_check(uniform, 0.0));
  CHECK(yuen_check(uniform, 0.5));

  const std::vector<double> cx = yuen_counterexample(2, 0.1);
  REQUIRE(cx.size() == 4);
  CHECK(cx[0] == doctest::Approx(0.325).epsilon(1e-15));
  for (int k = 1; k < 4; ++k) CHECK(cx[k] == doctest::Approx(0.225).epsilon(1e-15));
  CHECK_FALSE(yuen_check(cx, 0.1));
  CHECK(std::abs(cx[0] - 0.25) == doctest::Approx(0.075));
  CHECK(distance_to_uniform(cx) == doctest::Approx(0.075).epsilon(1e-14));
  CHECK(yuen_max_deviation(cx) == doctest::Approx(0.3));

  Rng rng(37);
  for (int trial = 0; trial < 200; ++trial) {
    const std::vector<double> p = random_probability_vector(std::size_t{1} << (trial % 5), rng);
    CHECK(max_guess_bound(p).holds);
  }
  CHECK_THROWS_AS(distance_to_uniform(std::vector<double>{0.5, 0.3, 0.2}), QkdError);
  CHECK_THROWS_AS(distance_to_uniform(std::vector<double>{1.2, -0.2}), QkdError);
}

}  // TEST_SUITE
