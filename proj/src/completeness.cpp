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

#include <boost/math/special_functions/beta.hpp>

#include "protocol_internal.hpp"
#include "qkdkit/protocol.hpp"
#include "qkdkit/random.hpp"

namespace qkdkit {

std::pair<double, double> clopper_pearson(std::uint64_t k, std::uint64_t n, double confidence) {
  if (n == 0 || k > n) throw QkdError(ErrorKind::kBadConfig, "Clopper-Pearson needs 0 <= k <= n and n > 0");
  const double alpha = 1.0 - confidence;
  const double kd = static_cast<double>(k), nd = static_cast<double>(n);
  const double lo = k == 0 ? 0.0 : boost::math::ibeta_inv(kd, nd - kd + 1.0, alpha / 2);
  const double hi = k == n ? 1.0 : boost::math::ibeta_inv(kd + 1.0, nd - kd, 1.0 - alpha / 2);
  return {lo, hi};
}

CompletenessEstimate estimate_completeness(const ProtocolConfig& cfg, const AttackModel& attack,
                                           std::uint64_t trials, std::uint64_t seed) {
  using K = AttackModel::Kind;
  if (attack.kind != K::kPassiveDepolarizing && attack.kind != K::kBlockAll) {
    throw QkdError(ErrorKind::kBadConfig, "completeness is defined for passive channels, not " + attack.name());
  }
  if (trials == 0) throw QkdError(ErrorKind::kBadConfig, "completeness needs at least one trial");
  cfg.validate();
  attack.validate(cfg.n_rounds);

  CompletenessEstimate est;
  est.trials = trials;
  est.exact_acceptance = run_protocol(cfg, attack).acceptance_probability;

  if (attack.kind != K::kBlockAll) {
    std::vector<std::vector<detail::RoundRecord>> records;
    for (std::uint32_t i = 0; i < cfg.n_rounds; ++i) records.push_back(detail::round_records(cfg, attack, i));
    std::vector<bool> is_test(cfg.n_rounds, false);
    for (std::uint32_t t : select_test_rounds(cfg)) is_test[t] = true;

    Rng rng(seed);
    std::vector<const detail::RoundRecord*> path(cfg.n_rounds);
    for (std::uint64_t t = 0; t < trials; ++t) {
      for (std::uint32_t i = 0; i < cfg.n_rounds; ++i) {
        const double u = uniform_unit(rng);
        double acc = 0.0;
        path[i] = &records[i].back();
        for (const auto& r : records[i]) {
          acc += r.prob;
          if (u < acc) {
            path[i] = &r;
            break;
          }
        }
      }
      if (detail::decide(cfg, is_test, path).accept) ++est.accepted;
    }
  }
  est.rate = static_cast<double>(est.accepted) / static_cast<double>(trials);
  std::tie(est.ci_low, est.ci_high) = clopper_pearson(est.accepted, trials);
  return est;
}

}  // namespace qkdkit
