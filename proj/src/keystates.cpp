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

#include "qkdkit/keystates.hpp"

#include <algorithm>
#include <cmath>

namespace qkdkit {
namespace {

double key_space(std::uint32_t l) { return std::ldexp(1.0, static_cast<int>(l)); }

std::uint64_t key_count(std::uint32_t l) { return std::uint64_t{1} << l; }

double entry_trace(const Matrix& op) { return op.trace().real(); }

// Sum of operators per Eve label within one block.
std::map<std::string, Matrix> eve_marginals(const KeyBlock& block, Eigen::Index dim) {
  std::map<std::string, Matrix> out;
  for (const auto& [idx, op] : block) {
    auto [it, inserted] = out.try_emplace(idx.eve, Matrix::Zero(dim, dim));
    it->second += op;
  }
  return out;
}

// Sum over labels of sum_k ||ops(k, label) - marg(label) / 2^l||_1, where ops
// holds the entries that are present and every absent k contributes
// tr(marg) / 2^l.
double distance_to_uniform_key(const std::map<std::pair<std::string, std::uint32_t>, Matrix>& ops,
                               const std::map<std::string, Matrix>& marginals, std::uint32_t l) {
  const double n = key_space(l);
  double total = 0.0;
  for (const auto& [label, marg] : marginals) {
    const Matrix ideal = marg / n;
    std::uint64_t present = 0;
    for (auto it = ops.lower_bound({label, 0}); it != ops.end() && it->first.first == label; ++it) {
      total += hermitian_trace_norm(it->second - ideal);
      ++present;
    }
    const double missing = static_cast<double>(key_count(l) - present);
    total += missing * std::max(0.0, entry_trace(marg)) / n;
  }
  return total;
}

}  // namespace

std::string to_bitstring(std::uint32_t value, std::uint32_t length) {
  std::string s(length, '0');
  for (std::uint32_t i = 0; i < length; ++i) {
    if ((value >> (length - 1 - i)) & 1u) s[i] = '1';
  }
  return s;
}

std::pair<std::uint32_t, std::uint32_t> parse_bitstring(const std::string& bits) {
  if (bits.size() > kMaxKeyLength) {
    throw QkdError(ErrorKind::kInvalidState, "key longer than " + std::to_string(kMaxKeyLength) + " bits");
  }
  std::uint32_t v = 0;
  for (char c : bits) {
    if (c != '0' && c != '1') throw QkdError(ErrorKind::kParse, "key value '" + bits + "' is not a bitstring");
    v = (v << 1) | static_cast<std::uint32_t>(c - '0');
  }
  return {v, static_cast<std::uint32_t>(bits.size())};
}

double KeyedCQState::block_weight(KeyLengthPair lengths) const {
  auto it = blocks_.find(lengths);
  if (it == blocks_.end()) return 0.0;
  double w = 0.0;
  for (const auto& [idx, op] : it->second) w += entry_trace(op);
  return w;
}

double KeyedCQState::total_trace() const {
  double w = 0.0;
  for (const auto& [lengths, block] : blocks_) w += block_weight(lengths);
  return w;
}

KeyedCQStateBuilder::KeyedCQStateBuilder(Eigen::Index dim_E) : dim_E_(dim_E) {
  if (dim_E < 1 || dim_E > kMaxEveDim) {
    throw QkdError(ErrorKind::kDimensionOverflow,
                   "Eve dimension " + std::to_string(dim_E) + " outside [1, " + std::to_string(kMaxEveDim) + "]");
  }
}

KeyedCQStateBuilder& KeyedCQStateBuilder::touch(KeyLengthPair lengths) {
  blocks_.try_emplace(lengths);
  return *this;
}

KeyedCQStateBuilder& KeyedCQStateBuilder::add(KeyLengthPair lengths, std::uint32_t kA, std::uint32_t kB,
                                              const Matrix& op, const std::string& eve) {
  if (op.rows() != dim_E_ || op.cols() != dim_E_) {
    throw QkdError(ErrorKind::kDimMismatch, "Eve operator has size " + std::to_string(op.rows()) + "x" +
                                                std::to_string(op.cols()) + ", expected " +
                                                std::to_string(dim_E_));
  }
  auto& block = blocks_[lengths];
  auto [it, inserted] = block.try_emplace(EntryIndex{kA, kB, eve}, op);
  if (!inserted) it->second += op;
  return *this;
}

KeyedCQState KeyedCQStateBuilder::build(const Tolerances& tol) const {
  KeyedCQState state;
  state.dim_E_ = dim_E_;
  for (const auto& [lengths, block] : blocks_) {
    if (!lengths.allowed()) {
      throw QkdError(ErrorKind::kInvalidState, "key-length pair (" + std::to_string(lengths.lA) + "," +
                                                   std::to_string(lengths.lB) + ") has two different nonzero lengths");
    }
    if (lengths.lA > kMaxKeyLength || lengths.lB > kMaxKeyLength) {
      throw QkdError(ErrorKind::kInvalidState, "key length above " + std::to_string(kMaxKeyLength));
    }
    KeyBlock& out = state.blocks_[lengths];
    for (const auto& [idx, op] : block) {
      if (idx.kA >= key_count(lengths.lA) || idx.kB >= key_count(lengths.lB)) {
        throw QkdError(ErrorKind::kInvalidState, "key value does not fit its block's length");
      }
      const SubnormalizedOperator checked = SubnormalizedOperator::validate(op, tol);
      out.emplace(idx, checked.matrix());
    }
  }
  const double total = state.total_trace();
  if (std::abs(total - 1.0) > tol.trace) {
    throw QkdError(ErrorKind::kBadTrace, "key state has total trace " + std::to_string(total));
  }
  return state;
}

KeyedCQState key_replacer(const KeyedCQState& state) {
  KeyedCQStateBuilder b(state.dim_E());
  for (const auto& [lengths, block] : state.blocks()) {
    b.touch(lengths);
    const std::uint32_t l = std::max(lengths.lA, lengths.lB);
    const double n = key_space(l);
    for (const auto& [label, marg] : eve_marginals(block, state.dim_E())) {
      const Matrix share = marg / n;
      for (std::uint64_t k = 0; k < key_count(l); ++k) {
        const auto kk = static_cast<std::uint32_t>(k);
        b.add(lengths, lengths.lA > 0 ? kk : 0, lengths.lB > 0 ? kk : 0, share, label);
      }
    }
  }
  return b.build();
}

double security_epsilon(const KeyedCQState& state) {
  double total = 0.0;
  for (const auto& [lengths, block] : state.blocks()) {
    const std::uint32_t l = std::max(lengths.lA, lengths.lB);
    // Entries the ideal state can hold: kA == kB for symmetric blocks, and
    // the empty key on the aborting side of an asymmetric block.
    std::map<std::pair<std::string, std::uint32_t>, Matrix> on_support;
    for (const auto& [idx, op] : block) {
      const bool supported = lengths.symmetric() ? idx.kA == idx.kB : true;
      if (supported) {
        on_support.emplace(std::make_pair(idx.eve, lengths.lA > 0 ? idx.kA : idx.kB), op);
      } else {
        total += hermitian_trace_norm(op);
      }
    }
    total += distance_to_uniform_key(on_support, eve_marginals(block, state.dim_E()), l);
  }
  return total;
}

double correctness_epsilon(const KeyedCQState& state) {
  double total = 0.0;
  for (const auto& [lengths, block] : state.blocks()) {
    if (!lengths.symmetric() || lengths.lA == 0) continue;
    // Classical key marginal p(kA, kB) and its copy-Alice image p_hat.
    std::map<std::pair<std::uint32_t, std::uint32_t>, double> p;
    for (const auto& [idx, op] : block) p[{idx.kA, idx.kB}] += entry_trace(op);
    std::map<std::uint32_t, double> p_hat;
    for (const auto& [keys, w] : p) p_hat[keys.first] += w;
    for (const auto& [keys, w] : p) {
      if (keys.first != keys.second) total += std::abs(w);
    }
    for (const auto& [kA, w] : p_hat) {
      auto it = p.find({kA, kA});
      total += std::abs((it == p.end() ? 0.0 : it->second) - w);
    }
  }
  return total;
}

double mismatch_probability(const KeyedCQState& state) {
  double total = 0.0;
  for (const auto& [lengths, block] : state.blocks()) {
    if (!lengths.symmetric() || lengths.lA == 0) continue;
    for (const auto& [idx, op] : block) {
      if (idx.kA != idx.kB) total += entry_trace(op);
    }
  }
  return total;
}

namespace {

struct AliceView {
  std::map<std::pair<std::string, std::uint32_t>, Matrix> ops;  // (label, kA)
  std::map<std::string, Matrix> marginals;
  double weight = 0.0;
};

// Traces out Bob's key register, including its length, grouping by lA.
std::map<std::uint32_t, AliceView> alice_views(const KeyedCQState& state) {
  std::map<std::uint32_t, AliceView> views;
  const Eigen::Index d = state.dim_E();
  for (const auto& [lengths, block] : state.blocks()) {
    AliceView& v = views[lengths.lA];
    for (const auto& [idx, op] : block) {
      auto [it, inserted] = v.ops.try_emplace({idx.eve, idx.kA}, Matrix::Zero(d, d));
      it->second += op;
      auto [mit, minserted] = v.marginals.try_emplace(idx.eve, Matrix::Zero(d, d));
      mit->second += op;
      v.weight += entry_trace(op);
    }
  }
  return views;
}

}  // namespace

std::map<std::uint32_t, double> secrecy_terms(const KeyedCQState& state) {
  std::map<std::uint32_t, double> terms;
  for (const auto& [l, view] : alice_views(state)) {
    terms[l] = l == 0 ? 0.0 : distance_to_uniform_key(view.ops, view.marginals, l);
  }
  return terms;
}

double secrecy_epsilon(const KeyedCQState& state) {
  double total = 0.0;
  for (const auto& [l, term] : secrecy_terms(state)) total += term;
  return total;
}

double fixed_length_secrecy(const KeyedCQState& state, std::uint32_t L) {
  const auto views = alice_views(state);
  for (const auto& [l, view] : views) {
    if (l != 0 && l != L) {
      throw QkdError(ErrorKind::kUnsupportedLengths,
                     "Alice's key takes length " + std::to_string(l) + ", expected only 0 or " + std::to_string(L));
    }
  }
  auto it = views.find(L);
  if (L == 0 || it == views.end()) return 0.0;
  const AliceView& v = it->second;
  const double pr = v.weight;
  if (!(pr > 0.0)) return 0.0;

  // Conditional state given Omega, then the prefactor.
  std::map<std::pair<std::string, std::uint32_t>, Matrix> cond_ops;
  for (const auto& [key, op] : v.ops) cond_ops.emplace(key, op / pr);
  std::map<std::string, Matrix> cond_marg;
  for (const auto& [label, op] : v.marginals) cond_marg.emplace(label, op / pr);
  return pr * distance_to_uniform_key(cond_ops, cond_marg, L);
}

double combine_parts(double eps_cor, double eps_sec) { return std::clamp(eps_cor + eps_sec, 0.0, 2.0); }

double acceptance_probability(const KeyedCQState& state) {
  double w = 0.0;
  for (const auto& [lengths, block] : state.blocks()) {
    if (lengths.lA != 0 || lengths.lB != 0) w += state.block_weight(lengths);
  }
  return w;
}

SecurityReport evaluate(const KeyedCQState& state) {
  SecurityReport r;
  r.epsilon_security = security_epsilon(state);
  r.epsilon_correctness = correctness_epsilon(state);
  r.mismatch_probability = mismatch_probability(state);
  r.per_length_terms = secrecy_terms(state);
  for (const auto& [l, term] : r.per_length_terms) r.epsilon_secrecy_alice += term;
  r.combined_bound = combine_parts(r.epsilon_correctness, r.epsilon_secrecy_alice);
  r.acceptance_probability = acceptance_probability(state);
  return r;
}

}  // namespace qkdkit
