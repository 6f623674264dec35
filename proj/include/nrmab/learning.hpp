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
#include <string>
#include <vector>

#include "nrmab/dynamics.hpp"

namespace nrmab {

// Dense (state, feasible action set) table. Actions are enumerated once in
// lexicographic member order (empty set first), the shared tie-break order.
struct QTable {
  int n = 0;
  int k = 0;
  std::vector<std::uint64_t> action_masks;
  std::vector<int> action_index_of_mask;  // 2^n entries, -1 if infeasible
  std::vector<double> values;             // [s * actions + index]
  std::vector<std::uint32_t> visits;

  int actions() const { return static_cast<int>(action_masks.size()); }
  int action_index(std::uint64_t mask) const {
    return action_index_of_mask[mask];
  }
  double value(std::uint64_t s, int ai) const {
    return values[s * action_masks.size() + ai];
  }
};

QTable make_qtable(const Instance& inst, double q_init);

// Greedy action over all enumerated feasible sets (ties resolve to the
// earliest, i.e. lexicographically smallest, set).
std::uint64_t qtable_greedy_tabular(const QTable& q, std::uint64_t s);
// Greedy action built by hill-climbing over the table, stopping on
// non-positive marginal gain.
std::uint64_t qtable_greedy_hc(const QTable& q, std::uint64_t s);

double qtable_max_tabular(const QTable& q, std::uint64_t s);
double qtable_max_hc(const QTable& q, std::uint64_t s);

struct LearningConfig {
  int episodes = 500;
  int steps_per_episode = 60;
  double alpha = 0.1;               // ignored when alpha_inverse_visits
  bool alpha_inverse_visits = false;
  double epsilon_start = 1.0;       // linear anneal across all steps
  double epsilon_end = 0.05;
  double q_init = 0.0;
  bool random_start = false;        // default: all-inactive start
  std::uint64_t seed = 0;
};

struct LearningCurvePoint {
  int episode = 0;
  double discounted_return = 0.0;
  double mean_activation = 0.0;
};

struct LearningResult {
  QTable table;
  std::vector<LearningCurvePoint> curve;
};

// Q-learning with the greedy target maximized over every feasible action
// set (the fully enumerated baseline).
LearningResult q_learn_tabular(const Instance& inst,
                               const LearningConfig& cfg);
// Same update rule, but behavior and target sets are built by hill-climbing
// over the current table, avoiding the exhaustive maximization.
LearningResult q_learn_hc(const Instance& inst, const LearningConfig& cfg);

// Flat "state action value visits" serialization.
void save_qtable(const QTable& q, const std::string& path);
QTable load_qtable(const Instance& inst, const std::string& path);

}  // namespace nrmab
