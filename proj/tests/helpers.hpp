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

#include "nrmab/instance.hpp"

namespace nrmab::testing {

// Worked two-node example: one edge with weight 0.5, arms that never
// activate passively from 0, budget 1.
inline Instance two_arm() {
  Instance inst;
  inst.n = 2;
  inst.edges = {{0, 1, 0.5}};
  inst.rewards = {1.0, 1.0};
  inst.dynamics.assign(2, ArmDynamics{0.0, 0.8, 0.7, 0.95});
  inst.budget_k = 1;
  inst.gamma = 0.9;
  validate_instance(inst);
  return inst;
}

inline Instance single_arm(double p01p, double p01a, double p11p,
                           double p11a) {
  Instance inst;
  inst.n = 1;
  inst.rewards = {1.0};
  inst.dynamics = {ArmDynamics{p01p, p01a, p11p, p11a}};
  inst.budget_k = 1;
  inst.gamma = 0.9;
  validate_instance(inst);
  return inst;
}

// Path 0-1-2 with weight 0.5 on both edges.
inline Instance path3(double w = 0.5) {
  Instance inst;
  inst.n = 3;
  inst.edges = {{0, 1, w}, {1, 2, w}};
  inst.rewards = {1.0, 1.0, 1.0};
  inst.dynamics.assign(3, ArmDynamics{0.1, 0.8, 0.7, 0.95});
  inst.budget_k = 2;
  inst.gamma = 0.9;
  validate_instance(inst);
  return inst;
}

inline Instance no_edges(int n, int k, double gamma = 0.9) {
  Instance inst;
  inst.n = n;
  inst.rewards.assign(n, 1.0);
  inst.dynamics.assign(n, ArmDynamics{0.1, 0.8, 0.7, 0.95});
  inst.budget_k = k;
  inst.gamma = gamma;
  validate_instance(inst);
  return inst;
}

}  // namespace nrmab::testing
