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
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "nrmab/bitset.hpp"
#include "nrmab/instance.hpp"
#include "nrmab/rng.hpp"

namespace nrmab {

// Action sets are sorted node lists; tabular code uses the bit-mask
// encoding (node v = 2^v) instead.
using ActionList = std::vector<NodeId>;

std::uint64_t action_mask(std::span<const NodeId> action);
ActionList action_from_mask(std::uint64_t mask, int n);
Bitset action_indicator(int n, std::span<const NodeId> action);

// Immediate reward: sum of r(v) over active nodes. Eq.-style R(s,a) does not
// depend on the action set.
double state_reward(const Instance& inst, const Bitset& s);
double state_reward_encoded(const Instance& inst, std::uint64_t s);

// One environment step: independent per-arm transitions into the temporary
// state u, then a full independent-cascade round seeded by every node active
// in u (multi-hop, one activation attempt per edge direction per step).
struct StepSample {
  Bitset u;     // post-transition, pre-cascade
  Bitset next;  // post-cascade
};
StepSample sample_step(const Instance& inst, const Bitset& s,
                       std::span<const NodeId> action, Rng& rng);

// Coupled coin flips: x_v is the arm's passive-transition outcome, y_v the
// active outcome coupled so x_v = 1 implies y_v = 1, and z_e marks live
// edges. A full profile makes the step outcome a deterministic function of
// the action set.
struct CoinProfile {
  Bitset x;  // per node
  Bitset y;  // per node
  Bitset z;  // per edge, indexed by position in Instance::edges
};

CoinProfile sample_coin_profile(const Instance& inst, const Bitset& s,
                                Rng& rng);

// Deterministic step outcome under a fixed profile: arms in the action set
// take y, the rest take x, then reachability over live edges.
Bitset apply_profile(const Instance& inst, const Bitset& s,
                     std::span<const NodeId> action,
                     const CoinProfile& profile);

// Exhaustive profile enumeration (3^n node combinations x 2^|E| edge masks)
// with the exact probability of each profile. Test/verification scale only.
void enumerate_coin_profiles(
    const Instance& inst, const Bitset& s,
    const std::function<void(double prob, const CoinProfile&)>& fn);

// Exact distributions for the two-phase kernel. States are bit-mask encoded.
// Construction is cheap; cascade distributions are cached per temporary
// state on first use (single-threaded), or all at once via
// precompute_cascades() which parallelizes and is required before any
// concurrent use.
class ExactKernel {
 public:
  static constexpr int kMaxNodes = 16;
  static constexpr int kMaxEdges = 20;
  // Work guard for whole-table precomputation: 2^n * 2^|E| closures.
  static constexpr std::uint64_t kMaxPrecomputeWork = std::uint64_t{1} << 27;

  using SparseDist = std::vector<std::pair<std::uint32_t, double>>;

  explicit ExactKernel(const Instance& inst);

  const Instance& instance() const { return *inst_; }
  int n() const { return inst_->n; }
  std::uint64_t num_states() const { return std::uint64_t{1} << inst_->n; }

  // P(u | s, a) for all u; product of per-arm marginals.
  std::vector<double> transition_distribution(std::uint64_t s,
                                              std::uint64_t a_mask) const;

  // P_G(s' | u) by summation over live-edge profiles; support listed in
  // increasing s' order. Cascades only activate, so s' always contains u.
  const SparseDist& cascade_distribution(std::uint64_t u);

  void precompute_cascades();

  // Composed kernel P(s' | s, a), dense over all 2^n next states.
  std::vector<double> full_kernel(std::uint64_t s, std::uint64_t a_mask);

  // E[V(s') | u] for every u, for sweep-style consumers.
  std::vector<double> cascade_expectation(std::span<const double> values);

  // sum_u P(u|s,a) * eu[u]
  double expected_under_transition(std::uint64_t s, std::uint64_t a_mask,
                                   std::span<const double> eu) const;

  double state_reward(std::uint64_t s) const { return state_reward_[s]; }

 private:
  const Instance* inst_;
  std::vector<double> state_reward_;
  std::vector<double> edge_mask_prob_;  // probability of each live-edge mask
  std::vector<std::unique_ptr<SparseDist>> cascade_;
  bool all_cascades_done_ = false;

  void ensure_edge_mask_probs();
  SparseDist compute_cascade(std::uint64_t u) const;
};

}  // namespace nrmab
