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

#include <cmath>

#include <doctest.h>

#include "helpers.hpp"
#include "nrmab/evaluation.hpp"

using namespace nrmab;

namespace {

Instance eval_instance(int n, int k) {
  GenSpec s;
  s.n = n;
  s.er_p = 0.3;
  s.cascade_w = 0.08;
  s.budget_k = k;
  s.gamma = 0.9;
  return generate_synthetic(s, 777);
}

}  // namespace

TEST_CASE("nothing activates without passive activation or interventions") {
  Instance inst;
  inst.n = 5;
  inst.edges = {{0, 1, 0.5}, {2, 3, 0.5}};
  inst.rewards.assign(5, 1.0);
  inst.dynamics.assign(5, ArmDynamics{0.0, 0.9, 0.6, 0.95});
  inst.budget_k = 2;
  inst.gamma = 0.9;
  validate_instance(inst);
  ExperimentConfig cfg;
  cfg.policies = {"none"};
  cfg.seeds = {1, 2};
  cfg.runs_per_seed = 5;
  cfg.horizon = 30;
  const auto res = run_experiment(inst, cfg);
  for (const auto& e : res.episodes)
    for (int c : e.active_counts) CHECK(c == 0);
}

TEST_CASE("common random numbers make repeated runs identical") {
  const Instance inst = eval_instance(8, 2);
  ExperimentConfig cfg;
  cfg.policies = {"none", "random"};
  cfg.seeds = {5};
  cfg.runs_per_seed = 4;
  cfg.horizon = 10;
  const auto r1 = run_experiment(inst, cfg);
  const auto r2 = run_experiment(inst, cfg);
  REQUIRE(r1.episodes.size() == r2.episodes.size());
  for (std::size_t i = 0; i < r1.episodes.size(); ++i) {
    CHECK(r1.episodes[i].active_counts == r2.episodes[i].active_counts);
    CHECK(r1.episodes[i].rewards == r2.episodes[i].rewards);
    CHECK(r1.episodes[i].actions == r2.episodes[i].actions);
  }
  CHECK(episodes_csv(r1.episodes) == episodes_csv(r2.episodes));
}

TEST_CASE("summary statistics recompute exactly from the raw logs") {
  const Instance inst = eval_instance(8, 2);
  ExperimentConfig cfg;
  cfg.policies = {"random", "whittle"};
  cfg.seeds = {3, 4};
  cfg.runs_per_seed = 6;
  cfg.horizon = 12;
  const auto res = run_experiment(inst, cfg);
  const auto redo = summarize(res.episodes, inst.n, cfg.horizon);
  REQUIRE(redo.size() == res.summary.size());
  for (std::size_t i = 0; i < redo.size(); ++i) {
    CHECK(redo[i].policy == res.summary[i].policy);
    CHECK(redo[i].mean_activation == res.summary[i].mean_activation);
    CHECK(redo[i].sd_activation == res.summary[i].sd_activation);
    CHECK(redo[i].mean_cumulative_reward ==
          res.summary[i].mean_cumulative_reward);
  }
}

TEST_CASE("discounted returns in logs match the per-step rewards") {
  const Instance inst = eval_instance(6, 2);
  ExperimentConfig cfg;
  cfg.policies = {"random"};
  cfg.seeds = {9};
  cfg.runs_per_seed = 3;
  cfg.horizon = 8;
  const auto res = run_experiment(inst, cfg);
  for (const auto& e : res.episodes) {
    double expect = 0.0;
    double disc = 1.0;
    for (double r : e.rewards) {
      expect += disc * r;
      disc *= inst.gamma;
    }
    CHECK(e.discounted_return == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("policy construction failures do not abort other policies") {
  const Instance inst = eval_instance(30, 5);  // too big for tabular learning
  ExperimentConfig cfg;
  cfg.policies = {"tabular-qlearn", "none"};
  cfg.seeds = {1};
  cfg.runs_per_seed = 2;
  cfg.horizon = 5;
  const auto res = run_experiment(inst, cfg);
  CHECK(res.policy_errors.count("tabular-qlearn") == 1);
  bool has_none = false;
  for (const auto& e : res.episodes) has_none |= e.policy == "none";
  CHECK(has_none);
}

TEST_CASE("unknown policy names are rejected with the valid list") {
  const Instance inst = eval_instance(6, 2);
  ExperimentConfig cfg;
  cfg.policies = {"nonsense"};
  cfg.seeds = {1};
  CHECK_THROWS_WITH_AS(run_experiment(inst, cfg),
                       doctest::Contains("lookahead1"), std::invalid_argument);
}

TEST_CASE("mean activation is non-decreasing in the budget") {
  Instance base = eval_instance(10, 1);
  Instance bigger = base;
  bigger.budget_k = 3;
  ExperimentConfig cfg;
  cfg.policies = {"random"};
  cfg.seeds = {1};
  cfg.runs_per_seed = 500;
  cfg.horizon = 15;
  const auto small = run_experiment(base, cfg);
  const auto large = run_experiment(bigger, cfg);
  const auto& ms = small.summary[0];
  const auto& ml = large.summary[0];
  const double t_last = static_cast<double>(cfg.horizon - 1);
  (void)t_last;
  const int t = cfg.horizon - 1;
  const double se =
      std::sqrt((ms.sd_activation[t] * ms.sd_activation[t] +
                 ml.sd_activation[t] * ml.sd_activation[t]) /
                cfg.runs_per_seed);
  CHECK(ml.mean_activation[t] >= ms.mean_activation[t] - 3.0 * se);
}

TEST_CASE("scaling rows carry the exact combinatorial counts") {
  ScalingConfig cfg;
  cfg.hill_climb_sizes = {12, 20};
  cfg.tabular_sizes = {6, 8};
  cfg.hill_climb_k = 4;
  cfg.tabular_k = 2;
  cfg.trials = 1;
  cfg.lookahead_samples = 16;
  const auto rows = runtime_scaling(cfg);
  auto find = [&](const std::string& method, int n, const std::string& meas) {
    for (const auto& r : rows)
      if (r.method == method && r.n == n && r.measure == meas) return r.value;
    FAIL("missing row ", method, " ", n, " ", meas);
    return 0.0;
  };
  // hill climbing evaluates sum_j (n - j + 1) candidates
  CHECK(find("hill_climb_decision", 12, "q_evaluations") ==
        12 + 11 + 10 + 9);
  CHECK(find("hill_climb_decision", 20, "q_evaluations") ==
        20 + 19 + 18 + 17);
  // tabular sweep touches 2^n * C(n, <=k) pairs
  CHECK(find("tabular_sweep", 6, "pairs") == 64.0 * (1 + 6 + 15));
  CHECK(find("tabular_sweep", 8, "pairs") == 256.0 * (1 + 8 + 28));
  CHECK(find("hill_climb_decision", 12, "seconds_per_decision") > 0.0);
}

TEST_CASE("episode CSV layout is stable") {
  const Instance inst = eval_instance(4, 1);
  ExperimentConfig cfg;
  cfg.policies = {"none"};
  cfg.seeds = {2};
  cfg.runs_per_seed = 1;
  cfg.horizon = 2;
  const auto res = run_experiment(inst, cfg);
  const std::string csv = episodes_csv(res.episodes);
  CHECK(csv.rfind("policy,seed,run,timestep,active_count,reward,decision_ms\n",
                  0) == 0);
  CHECK(csv.find("none,2,0,1,") != std::string::npos);
  CHECK(csv.find("none,2,0,2,") != std::string::npos);
}
