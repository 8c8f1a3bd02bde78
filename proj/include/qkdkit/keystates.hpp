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

// Classical-quantum key states with variable key lengths and asymmetric
// aborts, the key-replacer map and the security, correctness and secrecy
// evaluators.
//
// A state is a direct sum over key-length pairs (lA, lB). Inside a block each
// entry is indexed by Alice's key, Bob's key and a classical label for Eve's
// transcript register, and carries a subnormalized operator on Eve's quantum
// system. Entries with distinct indices are orthogonal, so trace norms of the
// whole state are sums of per-entry trace norms.

#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <string>
#include <utility>

#include "qkdkit/statekit.hpp"

namespace qkdkit {

inline constexpr std::uint32_t kMaxKeyLength = 16;
inline constexpr Eigen::Index kMaxEveDim = 256;

struct KeyLengthPair {
  std::uint32_t lA = 0;
  std::uint32_t lB = 0;
  /// Membership in the allowed set: lA == lB, or one side aborted.
  bool allowed() const { return lA == lB || lA == 0 || lB == 0; }
  bool symmetric() const { return lA == lB; }
  auto operator<=>(const KeyLengthPair&) const = default;
};

struct EntryIndex {
  std::uint32_t kA = 0;  // key value, most significant bit first
  std::uint32_t kB = 0;
  std::string eve;       // Eve's classical transcript; empty if none
  auto operator<=>(const EntryIndex&) const = default;
};

using KeyBlock = std::map<EntryIndex, Matrix>;

/// "010" <-> (2, 3). The first character is the most significant bit.
std::string to_bitstring(std::uint32_t value, std::uint32_t length);
std::pair<std::uint32_t, std::uint32_t> parse_bitstring(const std::string& bits);

class KeyedCQState {
 public:
  Eigen::Index dim_E() const { return dim_E_; }
  const std::map<KeyLengthPair, KeyBlock>& blocks() const { return blocks_; }
  /// Pr[Omega_{lA,lB}]; zero for absent blocks.
  double block_weight(KeyLengthPair lengths) const;
  double total_trace() const;

 private:
  friend class KeyedCQStateBuilder;
  Eigen::Index dim_E_ = 1;
  std::map<KeyLengthPair, KeyBlock> blocks_;
};

/// Accumulates entries (adding operators that land on the same index) and
/// validates on build(): lengths in the allowed set and <= kMaxKeyLength,
/// key values in range, operators Hermitian PSD of size dim_E, total trace 1.
class KeyedCQStateBuilder {
 public:
  explicit KeyedCQStateBuilder(Eigen::Index dim_E);
  KeyedCQStateBuilder& add(KeyLengthPair lengths, std::uint32_t kA, std::uint32_t kB, const Matrix& op,
                           const std::string& eve = {});
  /// Declares a block even if it ends up with no entries.
  KeyedCQStateBuilder& touch(KeyLengthPair lengths);
  KeyedCQState build(const Tolerances& tol = default_tolerances()) const;

 private:
  Eigen::Index dim_E_;
  std::map<KeyLengthPair, KeyBlock> blocks_;
};

/// Replaces the keys in every block by ideal ones while keeping the block
/// weights and Eve's per-block marginals: (0,0) keeps the empty keys, (l,0)
/// and (0,l) get a uniform key on the producing side, (l,l) gets a uniform
/// perfectly correlated pair.
KeyedCQState key_replacer(const KeyedCQState& state);

/// ||real - key_replacer(real)||_1, computed blockwise without building the
/// ideal state.
double security_epsilon(const KeyedCQState& state);

/// ||rho_{KA KB} - rho_hat||_1 on the key marginal, where rho_hat copies
/// Alice's key into Bob's register. Only symmetric blocks with l > 0 are
/// affected; asymmetric blocks count as no produced pair.
double correctness_epsilon(const KeyedCQState& state);

/// Pr[KA != KB and l > 0] over symmetric blocks.
double mismatch_probability(const KeyedCQState& state);

/// Per-length contributions sum_label sum_kA ||rho_{kA,E and Omega_l} -
/// 2^-l rho_{E and Omega_l}||_1, grouped by Alice's key length, on
/// subnormalized blocks.
std::map<std::uint32_t, double> secrecy_terms(const KeyedCQState& state);
double secrecy_epsilon(const KeyedCQState& state);

/// The single-length form Pr[Omega] * ||rho_{KA E|Omega} - tau (x)
/// rho_{E|Omega}||_1, computed on the conditional state. Throws
/// kUnsupportedLengths when Alice's key takes a length outside {0, L}.
double fixed_length_secrecy(const KeyedCQState& state, std::uint32_t L);

/// eps_cor + eps_sec clamped to [0, 2].
double combine_parts(double eps_cor, double eps_sec);

struct SecurityReport {
  double epsilon_security = 0.0;
  double epsilon_correctness = 0.0;
  double epsilon_secrecy_alice = 0.0;
  double mismatch_probability = 0.0;
  double combined_bound = 0.0;  // combine_parts(correctness, secrecy)
  std::map<std::uint32_t, double> per_length_terms;
  double acceptance_probability = 0.0;  // weight outside the (0,0) block
};

SecurityReport evaluate(const KeyedCQState& state);

/// Weight of every block except (0,0).
double acceptance_probability(const KeyedCQState& state);

}  // namespace qkdkit
