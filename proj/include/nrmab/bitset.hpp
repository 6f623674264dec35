// Copyright 2026 The Authors.
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

#pragma once

#include <bit>
#include <cstdint>
#include <vector>

namespace nrmab {

// Fixed-size bit vector sized at construction. Bit v is the 2^v digit of the
// canonical integer encoding (valid while n fits one machine word).
class Bitset {
 public:
  Bitset() = default;
  explicit Bitset(int n) : n_(n), w_((n + 63) / 64, 0) {}

  static Bitset from_encoded(std::uint64_t bits, int n) {
    Bitset b(n);
    if (!b.w_.empty()) b.w_[0] = bits;
    return b;
  }

  int size() const { return n_; }

  bool get(int v) const { return (w_[v >> 6] >> (v & 63)) & 1u; }

  void set(int v, bool value = true) {
    const std::uint64_t mask = std::uint64_t{1} << (v & 63);
    if (value)
      w_[v >> 6] |= mask;
    else
      w_[v >> 6] &= ~mask;
  }

  void clear() {
    for (auto& w : w_) w = 0;
  }

  int count() const {
    int c = 0;
    for (auto w : w_) c += std::popcount(w);
    return c;
  }

  bool any() const {
    for (auto w : w_)
      if (w) return true;
    return false;
  }

  // requires n_ <= 64
  std::uint64_t encoded() const { return w_.empty() ? 0 : w_[0]; }

  bool is_subset_of(const Bitset& other) const {
    for (std::size_t i = 0; i < w_.size(); ++i)
      if (w_[i] & ~other.w_[i]) return false;
    return true;
  }

  Bitset& operator|=(const Bitset& other) {
    for (std::size_t i = 0; i < w_.size(); ++i) w_[i] |= other.w_[i];
    return *this;
  }

  friend bool operator==(const Bitset& a, const Bitset& b) {
    return a.n_ == b.n_ && a.w_ == b.w_;
  }

  const std::vector<std::uint64_t>& words() const { return w_; }
  std::vector<std::uint64_t>& words() { return w_; }

 private:
  int n_ = 0;
  std::vector<std::uint64_t> w_;
};

}  // namespace nrmab
