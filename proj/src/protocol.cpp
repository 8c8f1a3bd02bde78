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

#include "qkdkit/protocol.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <numeric>

#include "protocol_internal.hpp"
#include "qkdkit/random.hpp"

namespace qkdkit {
namespace {

struct AttackOutcome {
  std::string symbol;
  std::vector<Matrix> kraus;  // (2 * e) x 2, Bob's qubit most significant
};

Matrix pauli(char which) {
  Matrix m = Matrix::Zero(2, 2);
  switch (which) {
    case 'I': m(0, 0) = 1.0; m(1, 1) = 1.0; break;
    case 'X': m(0, 1) = 1.0; m(1, 0) = 1.0; break;
    case 'Y': m(0, 1) = Complex(0, -1); m(1, 0) = Complex(0, 1); break;
    case 'Z': m(0, 0) = 1.0; m(1, 1) = -1.0; break;
  }
  return m;
}

// X-basis vectors are left unnormalized as (1, +-1); their squared norm is
// basis_norm2(1) = 2. Dividing by it keeps honest probabilities exact.
Eigen::Vector2cd basis_vector(int basis, int bit) {
  Eigen::Vector2cd v;
  if (basis == 0) {
    v << (bit == 0 ? 1.0 : 0.0), (bit == 0 ? 0.0 : 1.0);
  } else {
    v << 1.0, (bit == 0 ? 1.0 : -1.0);
  }
  return v;
}

double basis_norm2(int basis) { return basis == 0 ? 1.0 : 2.0; }

int basis_index(char c) { return c == 'X' ? 1 : 0; }
char basis_char(int b) { return b == 0 ? 'Z' : 'X'; }

// Measure in `basis` and resend the observed state.
std::vector<AttackOutcome> measure_resend(int basis, double weight) {
  std::vector<AttackOutcome> out;
  for (int z = 0; z < 2; ++z) {
    const Eigen::Vector2cd v = basis_vector(basis, z);
    Matrix k = (std::sqrt(weight) / basis_norm2(basis)) * (v * v.adjoint());
    out.push_back({std::string(1, basis_char(basis)) + char('0' + z), {k}});
  }
  return out;
}

std::vector<AttackOutcome> attack_outcomes(const AttackModel& attack, std::uint32_t round) {
  using K = AttackModel::Kind;
  switch (attack.kind) {
    case K::kPassiveDepolarizing: {
      const double p = attack.p;
      return {{"", {std::sqrt(1.0 - 0.75 * p) * pauli('I'), std::sqrt(p / 4) * pauli('X'),
                    std::sqrt(p / 4) * pauli('Y'), std::sqrt(p / 4) * pauli('Z')}}};
    }
    case K::kInterceptResend:
      if (attack.basis_rule == 'R') {
        auto out = measure_resend(0, 0.5);
        auto x = measure_resend(1, 0.5);
        out.insert(out.end(), x.begin(), x.end());
        return out;
      }
      return measure_resend(basis_index(attack.basis_rule), 1.0);
    case K::kFixedBasisGuess:
      return measure_resend(basis_index(attack.bases[round]), 1.0);
    case K::kEntanglingProbe: {
      Matrix v = Matrix::Zero(4, 2);
      v(0, 0) = 1.0;
      v(2, 1) = std::cos(attack.theta);
      v(3, 1) = std::sin(attack.theta);
      return {{"", {v}}};
    }
    case K::kBlockAll:
      break;
  }
  return {};
}

std::string join_label(const std::vector<std::string>& parts) {
  std::string s;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) s += '|';
    s += parts[i];
  }
  return s;
}

}  // namespace

// ---------------------------------------------------------------------------
// Config and attack

std::pair<std::uint32_t, std::uint32_t> parse_fraction(const std::string& text) {
  auto bad = [&] { return QkdError(ErrorKind::kBadConfig, "test_fraction '" + text + "' is not a fraction in [0, 1]"); };
  auto parse_uint = [&](const std::string& s) -> std::uint64_t {
    if (s.empty() || s.size() > 9 || !std::all_of(s.begin(), s.end(), ::isdigit)) throw bad();
    return std::stoull(s);
  };
  std::uint64_t num = 0, den = 1;
  if (auto slash = text.find('/'); slash != std::string::npos) {
    num = parse_uint(text.substr(0, slash));
    den = parse_uint(text.substr(slash + 1));
  } else if (auto dot = text.find('.'); dot != std::string::npos) {
    const std::string whole = text.substr(0, dot), frac = text.substr(dot + 1);
    const std::uint64_t w = whole.empty() ? 0 : parse_uint(whole);
    const std::uint64_t f = frac.empty() ? 0 : parse_uint(frac);
    den = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
    num = w * den + f;
  } else {
    num = parse_uint(text);
  }
  if (den == 0 || num > den) throw bad();
  const std::uint64_t g = std::gcd(num, den);
  return {static_cast<std::uint32_t>(num / g), static_cast<std::uint32_t>(den / g)};
}

void ProtocolConfig::validate() const {
  auto bad = [](const std::string& m) { return QkdError(ErrorKind::kBadConfig, m); };
  if (n_rounds < 1 || n_rounds > 8) throw bad("n_rounds must be in [1, 8]");
  if (test_denominator == 0 || test_numerator > test_denominator) throw bad("test_fraction must be in [0, 1]");
  if (!(qber_abort_threshold >= 0.0 && qber_abort_threshold <= 1.0)) throw bad("qber_abort_threshold must be in [0, 1]");
  if (!(z_basis_probability >= 0.0 && z_basis_probability <= 1.0)) throw bad("z_basis_probability must be in [0, 1]");
  if (key_length_rule.kind == KeyLengthRule::Kind::kFixed && key_length_rule.length > kMaxKeyLength) {
    throw bad("fixed key length above " + std::to_string(kMaxKeyLength));
  }
}

std::uint32_t ProtocolConfig::test_round_count() const {
  const std::uint64_t num = std::uint64_t{n_rounds} * test_numerator;
  return static_cast<std::uint32_t>((num + test_denominator - 1) / test_denominator);
}

AttackModel AttackModel::passive_depolarizing(double p) {
  AttackModel a;
  a.kind = Kind::kPassiveDepolarizing;
  a.p = p;
  return a;
}

AttackModel AttackModel::intercept_resend(char rule) {
  AttackModel a;
  a.kind = Kind::kInterceptResend;
  a.basis_rule = rule;
  return a;
}

AttackModel AttackModel::fixed_basis_guess(std::string bases) {
  AttackModel a;
  a.kind = Kind::kFixedBasisGuess;
  a.bases = std::move(bases);
  return a;
}

AttackModel AttackModel::block_all() {
  AttackModel a;
  a.kind = Kind::kBlockAll;
  return a;
}

AttackModel AttackModel::entangling_probe(double theta) {
  AttackModel a;
  a.kind = Kind::kEntanglingProbe;
  a.theta = theta;
  return a;
}

std::string AttackModel::name() const {
  switch (kind) {
    case Kind::kPassiveDepolarizing: return "passive_depolarizing";
    case Kind::kInterceptResend: return "intercept_resend";
    case Kind::kFixedBasisGuess: return "fixed_basis_guess";
    case Kind::kBlockAll: return "block_all";
    case Kind::kEntanglingProbe: return "entangling_probe";
  }
  return "unknown";
}

void AttackModel::validate(std::uint32_t n_rounds) const {
  auto bad = [](const std::string& m) { return QkdError(ErrorKind::kBadConfig, m); };
  switch (kind) {
    case Kind::kPassiveDepolarizing:
      if (!(p >= 0.0 && p <= 1.0)) throw bad("depolarizing probability must be in [0, 1]");
      break;
    case Kind::kInterceptResend:
      if (basis_rule != 'Z' && basis_rule != 'X' && basis_rule != 'R') {
        throw bad("intercept_resend basis rule must be Z, X or random");
      }
      break;
    case Kind::kFixedBasisGuess:
      if (bases.size() != n_rounds) throw bad("fixed_basis_guess needs one basis per round");
      if (bases.find_first_not_of("ZX") != std::string::npos) throw bad("bases must be Z or X");
      break;
    case Kind::kEntanglingProbe:
      if (!std::isfinite(theta)) throw bad("entangling_probe angle must be finite");
      break;
    case Kind::kBlockAll:
      break;
  }
}

std::vector<std::uint32_t> select_test_rounds(const ProtocolConfig& cfg) {
  std::vector<std::uint32_t> idx(cfg.n_rounds);
  std::iota(idx.begin(), idx.end(), 0u);
  Rng rng(cfg.seed);
  for (std::uint32_t i = cfg.n_rounds; i > 1; --i) {
    const auto j = static_cast<std::uint32_t>(uniform_index(rng, 0, i - 1));
    std::swap(idx[i - 1], idx[j]);
  }
  idx.resize(cfg.test_round_count());
  std::sort(idx.begin(), idx.end());
  return idx;
}

// ---------------------------------------------------------------------------
// Round records and the classical phase

namespace detail {

std::vector<RoundRecord> round_records(const ProtocolConfig& cfg, const AttackModel& attack, std::uint32_t round) {
  const std::vector<AttackOutcome> outcomes = attack_outcomes(attack, round);
  const double pz = cfg.z_basis_probability;
  const double p_basis[2] = {pz, 1.0 - pz};
  const Eigen::Index e = outcomes.front().kraus.front().rows() / 2;

  std::vector<RoundRecord> records;
  Matrix discarded = Matrix::Zero(e, e);
  for (int alpha = 0; alpha < 2; ++alpha) {
    if (p_basis[alpha] == 0.0) continue;
    for (int x = 0; x < 2; ++x) {
      const Eigen::Vector2cd psi = basis_vector(alpha, x);
      for (const AttackOutcome& o : outcomes) {
        Matrix joint = Matrix::Zero(2 * e, 2 * e);
        for (const Matrix& k : o.kraus) {
          const Eigen::VectorXcd out = k * psi;
          joint += out * out.adjoint();
        }
        joint /= basis_norm2(alpha);
        for (int beta = 0; beta < 2; ++beta) {
          double p_beta = 1.0;
          if (cfg.bob_basis == BobBasis::kMatched) {
            if (beta != alpha) continue;
          } else {
            p_beta = p_basis[beta];
            if (p_beta == 0.0) continue;
          }
          for (int y = 0; y < 2; ++y) {
            const Eigen::Vector2cd v = basis_vector(beta, y);
            Matrix eve = Matrix::Zero(e, e);
            for (int i = 0; i < 2; ++i) {
              for (int j = 0; j < 2; ++j) {
                eve += std::conj(v(i)) * v(j) * joint.block(i * e, j * e, e, e);
              }
            }
            eve *= p_basis[alpha] * 0.5 * p_beta / basis_norm2(beta);
            eve = 0.5 * (eve + eve.adjoint()).eval();
            const double prob = eve.trace().real();
            if (!(prob > 1e-300)) continue;
            if (alpha != beta) {
              discarded += eve;
              continue;
            }
            std::string token(1, basis_char(alpha));
            if (!o.symbol.empty()) token += "/" + o.symbol;
            records.push_back({true, alpha, x, y, std::move(token), std::move(eve), prob});
          }
        }
      }
    }
  }
  const double pd = discarded.trace().real();
  if (pd > 1e-300) records.push_back({false, 0, 0, 0, "d", discarded, pd});
  return records;
}

Decision decide(const ProtocolConfig& cfg, const std::vector<bool>& is_test,
                std::span<const RoundRecord* const> path) {
  Decision d;
  std::vector<std::string> parts;
  std::uint32_t tests = 0, errors = 0;
  for (std::size_t i = 0; i < path.size(); ++i) {
    const RoundRecord& r = *path[i];
    std::string token = r.token;
    if (r.sifted && is_test[i]) {
      ++tests;
      errors += r.x != r.y ? 1 : 0;
      token += ":";
      token += char('0' + r.x);
      token += char('0' + r.y);
    } else if (r.sifted) {
      d.raw_a = (d.raw_a << 1) | static_cast<std::uint32_t>(r.x);
      d.raw_b = (d.raw_b << 1) | static_cast<std::uint32_t>(r.y);
      ++d.raw_length;
    }
    parts.push_back(std::move(token));
  }
  const double qber = tests == 0 ? 0.0 : double(errors) / double(tests);
  bool abort = qber > cfg.qber_abort_threshold;

  std::uint32_t leaked = 0;
  if (cfg.reconciliation == Reconciliation::kParity && d.raw_length > 0) {
    const int pa = std::popcount(d.raw_a) & 1;
    const int pb = std::popcount(d.raw_b) & 1;
    parts.push_back(std::string("p") + char('0' + pa));
    if (pa != pb) abort = true;
    leaked = 1;
  }

  const KeyLengthRule& rule = cfg.key_length_rule;
  std::uint32_t l = 0;
  if (rule.kind == KeyLengthRule::Kind::kSiftedMinus) {
    const std::uint64_t spent = std::uint64_t{leaked} + rule.leak_budget;
    l = d.raw_length > spent ? static_cast<std::uint32_t>(d.raw_length - spent) : 0;
  } else {
    l = d.raw_length >= rule.length ? rule.length : 0;
  }
  d.accept = !abort && l > 0;
  d.length = d.accept ? l : 0;
  d.label = join_label(parts);
  return d;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Enumeration

RunArtifacts run_protocol(const ProtocolConfig& cfg, const AttackModel& attack) {
  cfg.validate();
  attack.validate(cfg.n_rounds);

  RunArtifacts out;
  out.transcript.test_rounds = select_test_rounds(cfg);
  out.transcript.hash_seed = cfg.seed;
  out.transcript.bob_basis = cfg.bob_basis == BobBasis::kMatched ? "matched" : "random";
  out.transcript.reconciliation = cfg.reconciliation == Reconciliation::kParity ? "parity" : "none";
  out.transcript.label_format =
      "rounds joined by '|': basis[/eve symbol][:alice bit bob bit on test rounds], 'd' for a discarded "
      "round, then p<alice parity> when parity is announced";

  if (attack.kind == AttackModel::Kind::kBlockAll) {
    // Nothing reaches Bob, so every branch aborts before any key exists.
    KeyedCQStateBuilder b(1);
    b.add({0, 0}, 0, 0, Matrix::Identity(1, 1), "blocked");
    out.final_state = b.build();
    out.acceptance_probability = 0.0;
    out.branches = 1;
    return out;
  }

  std::vector<std::vector<detail::RoundRecord>> records;
  Eigen::Index dim_E = 1;
  long double branches = 1;
  for (std::uint32_t i = 0; i < cfg.n_rounds; ++i) {
    records.push_back(detail::round_records(cfg, attack, i));
    dim_E *= records.back().front().eve.rows();
    branches *= static_cast<long double>(records.back().size());
  }
  if (dim_E > kMaxEveDim || branches * dim_E * dim_E > static_cast<long double>(cfg.max_work)) {
    throw QkdError(ErrorKind::kDimensionOverflow,
                   "exact enumeration needs " + std::to_string(static_cast<double>(branches)) +
                       " branches with Eve dimension " + std::to_string(dim_E));
  }
  out.branches = static_cast<std::uint64_t>(branches);

  std::vector<bool> is_test(cfg.n_rounds, false);
  for (std::uint32_t t : out.transcript.test_rounds) is_test[t] = true;

  KeyedCQStateBuilder builder(dim_E);
  builder.touch({0, 0});
  std::map<std::pair<std::uint32_t, std::uint32_t>, RawKeyBlock> raw_blocks;  // (raw length, l)

  std::vector<const detail::RoundRecord*> path(cfg.n_rounds, nullptr);
  std::vector<Matrix> partial(cfg.n_rounds + 1);
  partial[0] = Matrix::Identity(1, 1);

  auto leaf = [&]() {
    const detail::Decision d = detail::decide(cfg, is_test, path);
    const Matrix& op = partial[cfg.n_rounds];
    if (!d.accept) {
      builder.add({0, 0}, 0, 0, op, d.label);
      return;
    }
    RawKeyBlock& rb = raw_blocks[{d.raw_length, d.length}];
    rb.raw_length = d.raw_length;
    auto [it, inserted] = rb.entries.try_emplace(EntryIndex{d.raw_a, d.raw_b, d.label}, op);
    if (!inserted) it->second += op;
  };

  std::function<void(std::uint32_t)> walk = [&](std::uint32_t i) {
    if (i == cfg.n_rounds) {
      leaf();
      return;
    }
    for (const detail::RoundRecord& r : records[i]) {
      path[i] = &r;
      partial[i + 1] = kron(partial[i], r.eve);
      walk(i + 1);
    }
  };
  walk(0);

  for (const auto& [key, rb] : raw_blocks) {
    // The announced parity is the all-ones row over the raw bits.
    const std::uint32_t parity_row =
        cfg.reconciliation == Reconciliation::kParity && key.first > 0 ? (1u << key.first) - 1u : 0u;
    const ToeplitzHash hash = ToeplitzHash::seeded(cfg.seed, key.second, key.first, parity_row);
    for (const auto& [idx, op] : privacy_amplification(rb, hash)) {
      builder.add({key.second, key.second}, idx.kA, idx.kB, op, idx.eve);
    }
  }
  out.final_state = builder.build();
  out.acceptance_probability = acceptance_probability(out.final_state);
  return out;
}

}  // namespace qkdkit
