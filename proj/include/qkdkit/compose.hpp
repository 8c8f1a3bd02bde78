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

// Sequential and parallel composition of protocol runs, and the bound on how
// far an event's probability can move between a real and an ideal state.

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qkdkit/keystates.hpp"

namespace qkdkit {

/// Produces a run's final key state. Adaptive steps receive the joint Eve
/// label of all earlier runs, so an adversary can steer this run with what
/// she saw before; other steps receive an empty string and are called once.
using RunFactory = std::function<KeyedCQState(const std::string& prior_label)>;

struct RunStep {
  RunFactory make;
  bool adaptive = false;
};

struct ComposeOptions {
  std::size_t max_entries = std::size_t{1} << 20;
  double tol = 1e-9;
};

/// One joint entry keeps the per-run structure that the flat state hides.
struct JointEntry {
  std::vector<KeyLengthPair> lengths;  // per run
  std::vector<std::uint32_t> kA;       // per run
  std::vector<std::uint32_t> kB;
  std::string label;                   // per-run labels with length tags
  Matrix op;
};

struct JointRuns {
  KeyedCQState state;  // keys concatenated, run 1 most significant
  std::vector<JointEntry> entries;
  // Per run, averaged over earlier labels for adaptive runs.
  std::vector<double> security;
  std::vector<double> secrecy;
  std::vector<double> acceptance;
};

/// Builds the joint state of the runs. Eve's registers are combined with a
/// Kronecker product, keys are concatenated and labels are joined with the
/// per-run length pair as a tag, so the joint key replacer acts on both keys
/// at once. Throws kInvalidState if a concatenated length pair leaves the
/// allowed set, kDimensionOverflow above max_entries.
JointRuns build_joint(std::span<const RunStep> steps, const ComposeOptions& opts = {});

/// Tag used in joint labels, e.g. "L2,2:".
std::string length_tag(KeyLengthPair lengths);

struct ParallelTerms {
  double omega_probability = 0.0;  // Pr[both runs accept]
  // ||rho_{KA1 KA2 E and Omega} - tau (x) tau (x) rho_{E and Omega}||_1
  double measured_subnormalized = 0.0;
  // Same distance for the states conditioned on Omega; 0 if Pr[Omega] = 0.
  double measured_conditional = 0.0;
  // ||rho_{KA1 KA2 E and Omega} - tau_{KA1} (x) rho_{KA2 E and Omega}||_1
  double chain_first = 0.0;
  double chain_first_conditional = 0.0;
  // ||rho_{KA2 E and Omega} - tau_{KA2} (x) rho_{E and Omega}||_1
  double chain_second = 0.0;
};

struct CompositionReport {
  std::string mode;
  std::vector<double> component_epsilons;
  std::vector<double> component_acceptance;
  double combined_epsilon_measured = 0.0;
  double combined_epsilon_bound = 0.0;  // sum of components
  double slack = 0.0;                   // bound - measured
  bool within_bound = true;             // measured <= bound + tol
  std::optional<ParallelTerms> parallel;
};

/// Joint security_epsilon against the sum of per-run security_epsilon.
CompositionReport sequential_compose(std::span<const RunStep> steps, const ComposeOptions& opts = {});

/// Secrecy of the joint key on the event that both runs accept, against the
/// sum of per-run secrecies.
CompositionReport parallel_compose(const RunStep& run1, const RunStep& run2, const ComposeOptions& opts = {});

struct EventGap {
  double p_real = 0.0;
  double p_ideal = 0.0;
  double gap = 0.0;    // p_real - p_ideal
  double bound = 0.0;  // trace distance of the inputs
  bool within_bound = true;
};

/// p = tr[effect E(rho)] for both states. Throws kBadEffect unless
/// 0 <= effect <= 1 on the channel's output space.
EventGap event_probability_gap(const DensityOperator& rho_real, const DensityOperator& rho_ideal,
                               const KrausChannel& channel, const HermitianOperator& effect, double tol = 1e-10);

/// Basis guesses for an adversary that copies the previous run's public
/// transcript: the bases announced in the last run of a joint label, padded
/// with Z to n rounds.
std::string copied_bases(const std::string& prior_label, std::uint32_t n);

}  // namespace qkdkit
