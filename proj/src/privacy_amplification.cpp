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

#include <bit>
#include <random>

#include "qkdkit/protocol.hpp"

namespace qkdkit {

ToeplitzHash::ToeplitzHash(std::uint32_t rows, std::uint32_t cols, std::vector<std::uint8_t> diagonals)
    : rows_(rows), cols_(cols), s_(std::move(diagonals)) {
  if (cols > 32 || rows > 32) throw QkdError(ErrorKind::kDimensionOverflow, "Toeplitz hash above 32 bits");
  const std::size_t expected = rows + cols == 0 ? 0 : rows + cols - 1;
  if (s_.size() != expected) {
    throw QkdError(ErrorKind::kDimMismatch, "Toeplitz hash needs rows + cols - 1 diagonal bits");
  }
  for (auto& b : s_) b &= 1u;
}

ToeplitzHash ToeplitzHash::identity(std::uint32_t n) {
  std::vector<std::uint8_t> s(n == 0 ? 0 : 2 * n - 1, 0);
  if (n > 0) s[n - 1] = 1;
  return ToeplitzHash(n, n, std::move(s));
}

ToeplitzHash ToeplitzHash::seeded(std::uint64_t seed, std::uint32_t rows, std::uint32_t cols,
                                  std::uint32_t independent_of) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), cols, rows};
  std::mt19937_64 gen(seq);
  const std::size_t n = rows + cols == 0 ? 0 : rows + cols - 1;
  const std::uint32_t full = std::min(rows, cols);
  for (int attempt = 0;; ++attempt) {
    std::vector<std::uint8_t> s(n);
    for (auto& b : s) b = static_cast<std::uint8_t>(gen() >> 63);
    ToeplitzHash h(rows, cols, std::move(s));
    const bool ok = h.rank() == full &&
                    (independent_of == 0 || rows >= cols || h.rank_with(independent_of) == rows + 1);
    if (ok || attempt == 1000) return h;
  }
}

std::uint32_t ToeplitzHash::apply(std::uint32_t raw) const {
  std::uint32_t out = 0;
  for (std::uint32_t i = 0; i < rows_; ++i) {
    std::uint32_t bit = 0;
    for (std::uint32_t j = 0; j < cols_; ++j) {
      bit ^= at(i, j) & ((raw >> (cols_ - 1 - j)) & 1u);
    }
    out = (out << 1) | bit;
  }
  return out;
}

namespace {

// Rank over GF(2) of rows given as bitmasks over `cols` bits.
std::uint32_t gf2_rank(std::vector<std::uint32_t> rows, std::uint32_t cols) {
  const auto n = static_cast<std::uint32_t>(rows.size());
  std::uint32_t rank = 0;
  for (std::uint32_t col = 0; col < cols && rank < n; ++col) {
    const std::uint32_t mask = 1u << (cols - 1 - col);
    std::uint32_t pivot = rank;
    while (pivot < n && !(rows[pivot] & mask)) ++pivot;
    if (pivot == n) continue;
    std::swap(rows[rank], rows[pivot]);
    for (std::uint32_t r = 0; r < n; ++r) {
      if (r != rank && (rows[r] & mask)) rows[r] ^= rows[rank];
    }
    ++rank;
  }
  return rank;
}

}  // namespace

std::uint32_t ToeplitzHash::rank() const { return rank_with(0); }

std::uint32_t ToeplitzHash::rank_with(std::uint32_t row) const {
  std::vector<std::uint32_t> rows(rows_, 0);
  for (std::uint32_t i = 0; i < rows_; ++i) {
    for (std::uint32_t j = 0; j < cols_; ++j) rows[i] = (rows[i] << 1) | at(i, j);
  }
  if (row != 0) rows.push_back(row);
  return gf2_rank(std::move(rows), cols_);
}

KeyBlock privacy_amplification(const RawKeyBlock& raw, const ToeplitzHash& hash) {
  if (hash.cols() != raw.raw_length) {
    throw QkdError(ErrorKind::kDimMismatch, "hash expects " + std::to_string(hash.cols()) + "-bit input, raw keys have " +
                                                std::to_string(raw.raw_length) + " bits");
  }
  KeyBlock out;
  for (const auto& [idx, op] : raw.entries) {
    EntryIndex hashed{hash.apply(idx.kA), hash.apply(idx.kB), idx.eve};
    auto [it, inserted] = out.try_emplace(std::move(hashed), op);
    if (!inserted) it->second += op;
  }
  return out;
}

}  // namespace qkdkit
