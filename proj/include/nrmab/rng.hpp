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

#include <cstdint>
#include <initializer_list>
#include <random>

namespace nrmab {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Stream-splitting rule: a child seed is obtained by folding each path
// component into the parent seed through splitmix64. All parallel work
// (episodes, rollouts, checks) derives its generator as
// make_rng(master, {role, index, ...}) so execution order never matters.
inline std::uint64_t derive_seed(std::uint64_t master,
                                 std::initializer_list<std::uint64_t> path) {
  std::uint64_t s = splitmix64(master);
  for (std::uint64_t p : path) s = splitmix64(s ^ p);
  return s;
}

inline Rng make_rng(std::uint64_t master,
                    std::initializer_list<std::uint64_t> path = {}) {
  return Rng(derive_seed(master, path));
}

// Uniform in [0,1) built from the top 53 bits; avoids the
// implementation-defined std::uniform_real_distribution.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline bool chance(Rng& rng, double p) { return uniform01(rng) < p; }

// Unbiased integer in [0, m) by rejection.
inline std::uint64_t rand_below(Rng& rng, std::uint64_t m) {
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % m);
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % m;
}

}  // namespace nrmab
