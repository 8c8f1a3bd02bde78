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

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qkdkit/distinctness.hpp"
#include "qkdkit/random.hpp"

namespace qkdkit {
namespace {

Eigen::Index pick_dim(const ConformanceOptions& opts, Rng& rng) {
  return opts.dims[uniform_index(rng, 0, opts.dims.size() - 1)];
}

// Random rank so that pure and rank-deficient states show up alongside full
// rank ones.
DensityOperator sample_state(Eigen::Index dim, Rng& rng) {
  const auto rank = static_cast<Eigen::Index>(uniform_index(rng, 1, static_cast<std::uint64_t>(dim)));
  return random_density(dim, rank, rng);
}

class Tracker {
 public:
  Tracker(std::string name, std::string description, double tol) {
    r_.name = std::move(name);
    r_.description = std::move(description);
    tol_ = tol;
  }
  void record(double violation, std::initializer_list<DensityOperator> states, const std::string& note) {
    ++r_.samples;
    if (violation > r_.worst_violation) {
      r_.worst_violation = violation;
      r_.witness.assign(states.begin(), states.end());
      r_.witness_note = note;
    }
  }
  AxiomResult finish() {
    r_.passed = r_.worst_violation <= tol_;
    if (r_.passed) {
      r_.witness.clear();
      r_.witness_note.clear();
    }
    return r_;
  }

 private:
  AxiomResult r_;
  double tol_ = 0.0;
};

std::string fmt(const char* label, double v) {
  std::ostringstream os;
  os.precision(17);
  os << label << "=" << v;
  return os.str();
}

}  // namespace

bool ConformanceReport::all_passed() const {
  return std::all_of(results.begin(), results.end(), [](const AxiomResult& r) { return r.passed; });
}

const AxiomResult& ConformanceReport::at(const std::string& name) const {
  for (const auto& r : results) {
    if (r.name == name) return r;
  }
  throw QkdError(ErrorKind::kBadConfig, "no axiom named " + name);
}

ConformanceReport conformance_check(const MetricFunctional& f, const ConformanceOptions& opts) {
  if (opts.dims.empty()) throw QkdError(ErrorKind::kBadConfig, "conformance_check needs at least one dimension");
  ConformanceReport report;
  report.tol = opts.tol;
  report.seed = opts.seed;

  // One stream per axiom keeps each axiom's samples independent of the others.
  Rng seeder(opts.seed);
  Rng rng_a1(seeder()), rng_a2(seeder()), rng_a3(seeder()), rng_p1(seeder()), rng_p2(seeder());

  {
    Tracker t("A1", "triangle inequality f(r,t) <= f(r,s) + f(s,t)", opts.tol);
    for (std::size_t i = 0; i < opts.triples; ++i) {
      const Eigen::Index d = pick_dim(opts, rng_a1);
      const DensityOperator r = sample_state(d, rng_a1);
      const DensityOperator s = sample_state(d, rng_a1);
      const DensityOperator u = sample_state(d, rng_a1);
      const double rs = f(r, s), su = f(s, u), ru = f(r, u);
      t.record(ru - rs - su, {r, s, u}, fmt("f(r,t)", ru) + " " + fmt("f(r,s)+f(s,t)", rs + su));
    }
    report.results.push_back(t.finish());
  }
  {
    Tracker t("A2", "symmetry f(r,s) = f(s,r)", opts.tol);
    for (std::size_t i = 0; i < opts.pairs; ++i) {
      const Eigen::Index d = pick_dim(opts, rng_a2);
      const DensityOperator r = sample_state(d, rng_a2);
      const DensityOperator s = sample_state(d, rng_a2);
      const double rs = f(r, s), sr = f(s, r);
      t.record(std::abs(rs - sr), {r, s}, fmt("f(r,s)", rs) + " " + fmt("f(s,r)", sr));
    }
    report.results.push_back(t.finish());
  }
  {
    Tracker t("A3", "operational bound f((1-e)s + e s', s) <= e", opts.tol);
    for (std::size_t i = 0; i < opts.pairs; ++i) {
      const Eigen::Index d = pick_dim(opts, rng_a3);
      const DensityOperator s = sample_state(d, rng_a3);
      const DensityOperator s2 = sample_state(d, rng_a3);
      const double e = uniform_unit(rng_a3);
      const DensityOperator r = DensityOperator::validate((1.0 - e) * s.matrix() + e * s2.matrix());
      const double v = f(r, s);
      t.record(v - e, {r, s, s2}, fmt("f", v) + " " + fmt("eps", e));
    }
    report.results.push_back(t.finish());
  }
  {
    Tracker t("P1", "positive definiteness: f(r,r) = 0 and f(r,s) > 0 for r != s", opts.tol);
    for (std::size_t i = 0; i < opts.pairs; ++i) {
      const Eigen::Index d = pick_dim(opts, rng_p1);
      const DensityOperator r = sample_state(d, rng_p1);
      const DensityOperator s = sample_state(d, rng_p1);
      const double rr = f(r, r);
      t.record(std::abs(rr), {r, r}, fmt("f(r,r)", rr));
      const double td = trace_distance(r, s);
      if (td > 10.0 * opts.tol) {
        const double rs = f(r, s);
        // A distinct pair the functional cannot tell apart: the violation is
        // how far apart the states really are.
        t.record(rs <= opts.tol ? td : 0.0, {r, s}, fmt("f(r,s)", rs) + " " + fmt("trace_distance", td));
      }
    }
    report.results.push_back(t.finish());
  }
  {
    Tracker t("P2", "data processing f(E(r),E(s)) <= f(r,s)", opts.tol);
    for (std::size_t i = 0; i < opts.pairs; ++i) {
      const Eigen::Index d = pick_dim(opts, rng_p2);
      const Eigen::Index d_out = pick_dim(opts, rng_p2);
      const auto min_kraus = static_cast<std::uint64_t>((d + d_out - 1) / d_out);
      const auto n_kraus = static_cast<Eigen::Index>(uniform_index(rng_p2, min_kraus, min_kraus + 2));
      const DensityOperator r = sample_state(d, rng_p2);
      const DensityOperator s = sample_state(d, rng_p2);
      const KrausChannel ch = random_channel(d, d_out, n_kraus, rng_p2);
      const DensityOperator er = apply_channel(ch, r);
      const DensityOperator es = apply_channel(ch, s);
      const double before = f(r, s), after = f(er, es);
      t.record(after - before, {r, s, er, es}, fmt("f(E(r),E(s))", after) + " " + fmt("f(r,s)", before));
    }
    report.results.push_back(t.finish());
  }
  return report;
}

}  // namespace qkdkit
