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

// Pieces shared by the exact enumeration and the Monte-Carlo completeness
// estimate.

#pragma once

#include <span>
#include <string>
#include <vector>

#include "qkdkit/protocol.hpp"

namespace qkdkit::detail {

/// One joint outcome of a single round: Alice's basis and bit, Bob's outcome,
/// the public token Eve sees, and Eve's register weighted by the outcome
/// probability (its trace).
struct RoundRecord {
  bool sifted = true;
  int alpha = 0;  // 0 = Z, 1 = X
  int x = 0;
  int y = 0;
  std::string token;
  Matrix eve;
  double prob = 0.0;
};

/// Outcome records of round i; probabilities sum to 1. Discarded (unsifted)
/// outcomes are merged into one record since nothing about them reaches the
/// keys.
std::vector<RoundRecord> round_records(const ProtocolConfig& cfg, const AttackModel& attack, std::uint32_t round);

struct Decision {
  bool accept = false;
  std::uint32_t length = 0;
  std::uint32_t raw_length = 0;
  std::uint32_t raw_a = 0;
  std::uint32_t raw_b = 0;
  std::string label;
};

/// The classical phase applied to one branch.
Decision decide(const ProtocolConfig& cfg, const std::vector<bool>& is_test,
                std::span<const RoundRecord* const> path);

}  // namespace qkdkit::detail
