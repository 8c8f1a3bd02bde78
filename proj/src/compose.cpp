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

#include "qkdkit/compose.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>

namespace qkdkit {
namespace {

double weight(const Matrix& op) { return op.trace().real(); }

struct RunSummary {
  double security = 0.0;
  double secrecy = 0.0;
  double acceptance = 0.0;
};

RunSummary summarize(const KeyedCQState& s) {
  return {security_epsilon(s), secrecy_epsilon(s), acceptance_probability(s)};
}

void append_run(const JointEntry& prior, const KeyedCQState& run, std::vector<JointEntry>& out) {
  for (const auto& [lengths, block] : run.blocks()) {
    for (const auto& [idx, op] : block) {
      JointEntry e = prior;
      e.lengths.push_back(lengths);
      e.kA.push_back(idx.kA);
      e.kB.push_back(idx.kB);
      if (!e.label.empty()) e.label += " ; ";
      e.label += length_tag(lengths) + idx.eve;
      e.op = kron(prior.op, op);
      out.push_back(std::move(e));
    }
  }
}

std::size_t entry_count(const KeyedCQState& s) {
  std::size_t n = 0;
  for (const auto& [lengths, block] : s.blocks()) n += block.size();
  return n;
}

}  // namespace

std::string length_tag(KeyLengthPair lengths) {
  return "L" + std::to_string(lengths.lA) + "," + std::to_string(lengths.lB) + ":";
}

JointRuns build_joint(std::span<const RunStep> steps, const ComposeOptions& opts) {
  if (steps.empty()) throw QkdError(ErrorKind::kBadConfig, "composition needs at least one run");
  JointRuns out;
  std::vector<JointEntry> current{JointEntry{{}, {}, {}, "", Matrix::Identity(1, 1)}};
  Eigen::Index dim_E = 1;

  for (const RunStep& step : steps) {
    // Runs to attach, keyed by the prior label they apply to ("" = all).
    std::map<std::string, KeyedCQState> runs;
    RunSummary summary;
    if (!step.adaptive) {
      const KeyedCQState s = step.make("");
      summary = summarize(s);
      runs.emplace("", s);
    } else {
      std::map<std::string, double> prior_weight;
      for (const JointEntry& e : current) prior_weight[e.label] += weight(e.op);
      for (const auto& [label, w] : prior_weight) {
        const KeyedCQState s = step.make(label);
        const RunSummary r = summarize(s);
        summary.security += w * r.security;
        summary.secrecy += w * r.secrecy;
        summary.acceptance += w * r.acceptance;
        runs.emplace(label, s);
      }
    }
    const Eigen::Index d = runs.begin()->second.dim_E();
    std::size_t projected = 0;
    for (const auto& [label, s] : runs) {
      if (s.dim_E() != d) throw QkdError(ErrorKind::kDimMismatch, "adaptive run changed its Eve dimension");
      projected = std::max(projected, entry_count(s));
    }
    if (static_cast<long double>(projected) * current.size() > opts.max_entries ||
        dim_E * d > kMaxEveDim) {
      throw QkdError(ErrorKind::kDimensionOverflow, "joint state would exceed the entry or Eve-dimension limit");
    }
    dim_E *= d;

    std::vector<JointEntry> next;
    for (const JointEntry& e : current) {
      const KeyedCQState& run = step.adaptive ? runs.at(e.label) : runs.at("");
      append_run(e, run, next);
    }
    current = std::move(next);
    out.security.push_back(summary.security);
    out.secrecy.push_back(summary.secrecy);
    out.acceptance.push_back(summary.acceptance);
  }

  KeyedCQStateBuilder b(dim_E);
  for (const JointEntry& e : current) {
    KeyLengthPair total;
    std::uint32_t kA = 0, kB = 0;
    for (std::size_t r = 0; r < e.lengths.size(); ++r) {
      total.lA += e.lengths[r].lA;
      total.lB += e.lengths[r].lB;
      kA = (kA << e.lengths[r].lA) | e.kA[r];
      kB = (kB << e.lengths[r].lB) | e.kB[r];
    }
    if (!total.allowed()) {
      throw QkdError(ErrorKind::kInvalidState, "concatenated key lengths (" + std::to_string(total.lA) + "," +
                                                   std::to_string(total.lB) + ") are not an allowed pair");
    }
    b.add(total, kA, kB, e.op, e.label);
  }
  out.state = b.build();
  out.entries = std::move(current);
  return out;
}

CompositionReport sequential_compose(std::span<const RunStep> steps, const ComposeOptions& opts) {
  if (steps.size() < 2) throw QkdError(ErrorKind::kBadConfig, "sequential composition needs at least two runs");
  const JointRuns joint = build_joint(steps, opts);
  CompositionReport r;
  r.mode = "sequential";
  r.component_epsilons = joint.security;
  r.component_acceptance = joint.acceptance;
  r.combined_epsilon_measured = security_epsilon(joint.state);
  for (double e : joint.security) r.combined_epsilon_bound += e;
  r.slack = r.combined_epsilon_bound - r.combined_epsilon_measured;
  r.within_bound = r.combined_epsilon_measured <= r.combined_epsilon_bound + opts.tol;
  return r;
}

namespace {

using Key2 = std::tuple<std::string, std::uint32_t, std::uint32_t>;

struct OmegaView {
  std::map<Key2, Matrix> ops;                                          // (label, kA1, kA2)
  std::map<std::pair<std::string, std::uint32_t>, Matrix> second;      // (label, kA2)
  std::map<std::string, Matrix> marginal;                              // label
  std::map<std::string, std::pair<std::uint32_t, std::uint32_t>> len;  // label -> (l1, l2)
  double probability = 0.0;
};

template <class K>
void accumulate(std::map<K, Matrix>& m, const K& k, const Matrix& op) {
  auto [it, inserted] = m.try_emplace(k, op);
  if (!inserted) it->second += op;
}

struct Terms {
  double measured = 0.0;
  double first = 0.0;
  double second = 0.0;
};

// Distances on the subnormalized states restricted to Omega.
Terms omega_terms(const OmegaView& v) {
  Terms t;
  for (const auto& [label, marg] : v.marginal) {
    const auto [l1, l2] = v.len.at(label);
    const double n1 = std::ldexp(1.0, int(l1)), n2 = std::ldexp(1.0, int(l2));
    const double n12 = n1 * n2;
    std::size_t present12 = 0, present2 = 0;
    for (auto it = v.second.lower_bound({label, 0}); it != v.second.end() && it->first.first == label; ++it) {
      const std::uint32_t k2 = it->first.second;
      const Matrix& op2 = it->second;
      ++present2;
      t.second += hermitian_trace_norm(op2 - marg / n2);
      std::size_t present1 = 0;
      for (std::uint32_t k1 = 0; k1 < (1u << l1); ++k1) {
        auto f = v.ops.find({label, k1, k2});
        if (f == v.ops.end()) continue;
        ++present1;
        ++present12;
        const Matrix& op = f->second;
        t.first += hermitian_trace_norm(op - op2 / n1);
        t.measured += hermitian_trace_norm(op - marg / n12);
      }
      t.first += static_cast<double>((std::uint64_t{1} << l1) - present1) * weight(op2) / n1;
    }
    t.second += static_cast<double>((std::uint64_t{1} << l2) - present2) * weight(marg) / n2;
    t.measured += (n12 - static_cast<double>(present12)) * weight(marg) / n12;
  }
  return t;
}

}  // namespace

CompositionReport parallel_compose(const RunStep& run1, const RunStep& run2, const ComposeOptions& opts) {
  const RunStep steps[] = {run1, run2};
  const JointRuns joint = build_joint(steps, opts);

  OmegaView v;
  for (const JointEntry& e : joint.entries) {
    const std::uint32_t l1 = e.lengths[0].lA, l2 = e.lengths[1].lA;
    if (l1 == 0 || l2 == 0) continue;
    accumulate(v.ops, Key2{e.label, e.kA[0], e.kA[1]}, e.op);
    accumulate(v.second, std::make_pair(e.label, e.kA[1]), e.op);
    accumulate(v.marginal, e.label, e.op);
    v.len[e.label] = {l1, l2};
    v.probability += weight(e.op);
  }

  ParallelTerms p;
  p.omega_probability = v.probability;
  const Terms sub = omega_terms(v);
  p.measured_subnormalized = sub.measured;
  p.chain_first = sub.first;
  p.chain_second = sub.second;
  if (v.probability > 0.0) {
    // Every distance is linear in the state, so conditioning divides it.
    p.measured_conditional = sub.measured / v.probability;
    p.chain_first_conditional = sub.first / v.probability;
  }

  CompositionReport r;
  r.mode = "parallel";
  r.component_epsilons = joint.secrecy;
  r.component_acceptance = joint.acceptance;
  r.combined_epsilon_measured = p.measured_subnormalized;
  r.combined_epsilon_bound = joint.secrecy[0] + joint.secrecy[1];
  r.slack = r.combined_epsilon_bound - r.combined_epsilon_measured;
  r.within_bound = r.combined_epsilon_measured <= r.combined_epsilon_bound + opts.tol;
  r.parallel = p;
  return r;
}

EventGap event_probability_gap(const DensityOperator& rho_real, const DensityOperator& rho_ideal,
                               const KrausChannel& channel, const HermitianOperator& effect, double tol) {
  require_same_dim(rho_real.dim(), rho_ideal.dim(), "event_probability_gap");
  require_same_dim(effect.dim(), channel.dim_out(), "event_probability_gap effect");
  require_effect(effect);
  const DensityOperator out_real = apply_channel(channel, rho_real);
  const DensityOperator out_ideal = apply_channel(channel, rho_ideal);
  EventGap g;
  g.p_real = (effect.matrix() * out_real.matrix()).trace().real();
  g.p_ideal = (effect.matrix() * out_ideal.matrix()).trace().real();
  g.gap = g.p_real - g.p_ideal;
  g.bound = 0.5 * hermitian_trace_norm(rho_real.matrix() - rho_ideal.matrix());
  g.within_bound = g.gap <= g.bound + tol;
  return g;
}

std::string copied_bases(const std::string& prior_label, std::uint32_t n) {
  std::string last = prior_label;
  if (auto pos = last.rfind(" ; "); pos != std::string::npos) last = last.substr(pos + 3);
  if (auto colon = last.find(':'); colon != std::string::npos && last[0] == 'L') last = last.substr(colon + 1);
  std::string bases;
  std::size_t start = 0;
  while (start <= last.size() && bases.size() < n) {
    const std::size_t end = std::min(last.find('|', start), last.size());
    const std::string token = last.substr(start, end - start);
    if (!token.empty() && (token[0] == 'Z' || token[0] == 'X')) bases += token[0];
    start = end + 1;
  }
  bases.resize(n, 'Z');
  return bases;
}

}  // namespace qkdkit
