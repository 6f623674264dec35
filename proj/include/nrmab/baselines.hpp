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

#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "nrmab/learning.hpp"
#include "nrmab/planning.hpp"

namespace nrmab {

// A decision rule State -> ActionSet with |A| <= k. Deterministic policies
// ignore the rng handle.
class Policy {
 public:
  virtual ~Policy() = default;
  virtual const std::string& name() const { return name_; }
  virtual ActionList select(const Bitset& s, Rng& rng) = 0;
  virtual nlohmann::json metadata() const { return nlohmann::json::object(); }

 protected:
  explicit Policy(std::string name) : name_(std::move(name)) {}
  std::string name_;
};

// ---------------------------------------------------------------------------
// Whittle index (network-blind): per arm and per arm-state, the passive
// subsidy that makes active and passive actions equally valuable in the
// decoupled two-state MDP; arms are ranked by their current-state index.
// ---------------------------------------------------------------------------
struct WhittleIndices {
  // index[v][sigma] for sigma in {0,1}
  std::vector<std::array<double, 2>> index;
  std::vector<std::string> warnings;  // indexability (monotonicity) findings
};

// Exact two-state solve: optimal values under subsidy lambda on the passive
// action, by closed-form evaluation of the four stationary policies.
std::array<double, 2> solve_subsidized_arm(const ArmDynamics& d, double r,
                                           double gamma, double lambda);

WhittleIndices compute_whittle_indices(const Instance& inst);

std::unique_ptr<Policy> whittle_policy(const Instance& inst);

// Myopic network-aware baseline: hill-climbing on E[R(s') | s, A], exact
// below the enumeration cap, otherwise m Monte-Carlo samples per selection
// round.
std::unique_ptr<Policy> one_step_lookahead_policy(const Instance& inst,
                                                  int samples);

// Ranks singleton Q-values and returns the top k, ignoring set conditioning.
std::unique_ptr<Policy> topk_singleton_policy(
    const Instance& inst, std::shared_ptr<QEvaluator> qsource,
    const std::string& name = "topk");

// Generic greedy policy over any Q evaluator.
std::unique_ptr<Policy> hill_climb_policy(const Instance& inst,
                                          std::shared_ptr<QEvaluator> qsource,
                                          const std::string& name);

std::unique_ptr<Policy> random_policy(const Instance& inst);
std::unique_ptr<Policy> none_policy(const Instance& inst);

// Greedy policy extracted from a learned table; hill_climbing selects the
// set the same way the learner's behavior policy did.
std::unique_ptr<Policy> qtable_policy(const Instance& inst, QTable table,
                                      bool hill_climbing,
                                      const std::string& name);

// ---------------------------------------------------------------------------
// Named policy construction for the experiment harness and CLI.
// ---------------------------------------------------------------------------
struct PolicyParams {
  int lookahead_samples = 200;
  int rollout_horizon = 5;
  int rollouts = 10;
  LearningConfig train;  // for the q-learning policies; seed is overridden
};

const std::vector<std::string>& known_policy_names();

// Throws std::invalid_argument for unknown names (listing the valid ones)
// and std::runtime_error when construction is infeasible on this instance.
std::unique_ptr<Policy> make_policy(const std::string& policy_name,
                                    const Instance& inst,
                                    const PolicyParams& params,
                                    std::uint64_t master_seed);

}  // namespace nrmab
