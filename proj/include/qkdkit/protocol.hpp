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

// Exact simulation of a small prepare-and-measure protocol in the BB84
// family. Every classical random choice (Alice's bases and bits, Bob's bases
// and outcomes, the adversary's measurement outcomes) is enumerated with its
// probability, so the final key state is the exact state of the model, not a
// sample.
//
// Stages per run:
//   quantum      Alice prepares one qubit per round in the Z or X basis; the
//                attack maps it to Bob's qubit plus an Eve register and an
//                Eve classical symbol; Bob measures.
//   classical    Bases are announced and rounds with differing bases are
//                discarded. A public, seeded subset of rounds is used for
//                testing: both bits are announced and the error rate is
//                compared against the threshold. Alice announces the parity
//                of her raw key and Bob aborts on a mismatch.
//   processing   Both raw keys go through the same public Toeplitz hash.
// Eve's classical label records everything announced plus her own symbols.

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "qkdkit/keystates.hpp"

namespace qkdkit {

enum class BobBasis {
  kMatched,  // Bob measures after the basis announcement, in Alice's basis
  kRandom,   // Bob picks his basis with the same bias as Alice; rounds are sifted
};

enum class Reconciliation { kParity, kNone };

struct KeyLengthRule {
  enum class Kind { kSiftedMinus, kFixed };
  Kind kind = Kind::kSiftedMinus;
  // kSiftedMinus: l = max(0, raw - parity_bits - leak_budget), where raw is the
  // number of sifted rounds not used for testing.
  std::uint32_t leak_budget = 0;
  // kFixed: l = length when raw >= length, abort otherwise.
  std::uint32_t length = 0;
};

struct ProtocolConfig {
  std::uint32_t n_rounds = 2;
  std::uint32_t test_numerator = 0;
  std::uint32_t test_denominator = 1;
  double qber_abort_threshold = 0.0;
  KeyLengthRule key_length_rule{};
  std::uint64_t seed = 1;
  double z_basis_probability = 0.5;
  BobBasis bob_basis = BobBasis::kMatched;
  Reconciliation reconciliation = Reconciliation::kParity;
  // Upper bound on (classical branches) x dim_E^2.
  std::uint64_t max_work = std::uint64_t{1} << 26;

  /// Throws kBadConfig on out-of-range fields.
  void validate() const;
  /// ceil(n_rounds * test_fraction).
  std::uint32_t test_round_count() const;
};

/// Parses "a/b", "a" or a decimal in [0, 1] written with up to 9 digits.
std::pair<std::uint32_t, std::uint32_t> parse_fraction(const std::string& text);

struct AttackModel {
  enum class Kind { kPassiveDepolarizing, kInterceptResend, kFixedBasisGuess, kBlockAll, kEntanglingProbe };
  Kind kind = Kind::kPassiveDepolarizing;
  double p = 0.0;           // depolarizing probability
  char basis_rule = 'Z';    // intercept_resend: 'Z', 'X' or 'R' (random per round)
  std::string bases;        // fixed_basis_guess: one of Z/X per round
  double theta = 0.0;       // entangling_probe angle

  static AttackModel passive_depolarizing(double p);
  static AttackModel intercept_resend(char rule);
  static AttackModel fixed_basis_guess(std::string bases);
  static AttackModel block_all();
  static AttackModel entangling_probe(double theta);

  std::string name() const;
  void validate(std::uint32_t n_rounds) const;
};

struct Transcript {
  std::vector<std::uint32_t> test_rounds;
  std::uint64_t hash_seed = 0;
  std::string bob_basis;
  std::string reconciliation;
  std::string label_format;
};

struct RunArtifacts {
  KeyedCQState final_state;
  Transcript transcript;
  double acceptance_probability = 0.0;
  std::uint64_t branches = 0;
};

RunArtifacts run_protocol(const ProtocolConfig& cfg, const AttackModel& attack);

/// Public test-round indices: a Fisher-Yates shuffle seeded with cfg.seed,
/// first test_round_count() entries, sorted.
std::vector<std::uint32_t> select_test_rounds(const ProtocolConfig& cfg);

// ---------------------------------------------------------------------------
// Privacy amplification

/// Binary l x r Toeplitz matrix, T[i][j] = s[i - j + r - 1].
class ToeplitzHash {
 public:
  ToeplitzHash(std::uint32_t rows, std::uint32_t cols, std::vector<std::uint8_t> diagonals);
  /// The first full-rank candidate drawn from a generator seeded with
  /// (seed, cols, rows). Deterministic across platforms. A nonzero
  /// `independent_of` (a row over the input bits, MSB first) additionally
  /// requires that row to lie outside the hash's row space when rows < cols,
  /// so the output stays uniform given that announced linear function.
  static ToeplitzHash seeded(std::uint64_t seed, std::uint32_t rows, std::uint32_t cols,
                             std::uint32_t independent_of = 0);
  /// rows == cols, diagonals picking out the identity.
  static ToeplitzHash identity(std::uint32_t n);

  std::uint32_t rows() const { return rows_; }
  std::uint32_t cols() const { return cols_; }
  std::uint8_t at(std::uint32_t i, std::uint32_t j) const { return s_[i + cols_ - 1 - j]; }
  /// Hashes an r-bit value, most significant bit first.
  std::uint32_t apply(std::uint32_t raw) const;
  std::uint32_t rank() const;
  /// Rank of the matrix with `row` appended.
  std::uint32_t rank_with(std::uint32_t row) const;

 private:
  std::uint32_t rows_;
  std::uint32_t cols_;
  std::vector<std::uint8_t> s_;
};

/// A classical-quantum block over raw keys of a common length.
struct RawKeyBlock {
  std::uint32_t raw_length = 0;
  KeyBlock entries;  // kA, kB are raw keys
};

/// Maps both keys of every entry through the hash and sums Eve operators over
/// preimages. Throws kDimMismatch unless hash.cols() == raw_length.
KeyBlock privacy_amplification(const RawKeyBlock& raw, const ToeplitzHash& hash);

// ---------------------------------------------------------------------------
// Completeness

struct CompletenessEstimate {
  std::uint64_t trials = 0;
  std::uint64_t accepted = 0;
  double rate = 0.0;
  double ci_low = 0.0;   // Clopper-Pearson, 95%
  double ci_high = 1.0;
  double exact_acceptance = 0.0;  // from run_protocol
};

/// Monte-Carlo acceptance frequency for a passive channel (depolarizing or
/// block_all). Throws kBadConfig for active attacks.
CompletenessEstimate estimate_completeness(const ProtocolConfig& cfg, const AttackModel& attack,
                                           std::uint64_t trials, std::uint64_t seed);

/// Two-sided Clopper-Pearson interval for k successes in n trials.
std::pair<double, double> clopper_pearson(std::uint64_t k, std::uint64_t n, double confidence = 0.95);

}  // namespace qkdkit
