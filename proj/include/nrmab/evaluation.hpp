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

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "nrmab/baselines.hpp"

namespace nrmab {

struct ExperimentConfig {
  std::vector<std::string> policies;
  std::vector<std::uint64_t> seeds;
  int runs_per_seed = 50;
  int horizon = 30;
  bool measure_decision_time = false;  // keeps output deterministic when off
  PolicyParams params;
};

// Per-episode trajectory. Timestep t rows describe the state reached by the
// decision taken at epoch t-1; rewards are attributed to the produced state,
// so the discounted return is sum_t gamma^(t-1) * reward[t].
struct EpisodeLog {
  std::string policy;
  std::uint64_t seed = 0;
  int run = 0;
  std::vector<int> active_counts;      // length horizon
  std::vector<double> rewards;         // length horizon
  std::vector<ActionList> actions;     // length horizon
  std::vector<double> decision_ms;     // zeros unless timing was requested
  double discounted_return = 0.0;
};

struct PolicySummary {
  std::string policy;
  std::vector<double> mean_activation;  // fraction, per timestep
  std::vector<double> sd_activation;
  double mean_cumulative_reward = 0.0;
  double mean_reward_per_timestep = 0.0;
  double mean_decision_ms = 0.0;
  int episodes = 0;
};

struct ExperimentResult {
  std::vector<EpisodeLog> episodes;  // ordered by (policy, seed, run)
  std::vector<PolicySummary> summary;
  std::map<std::string, std::string> policy_errors;
  std::map<std::string, nlohmann::json> policy_metadata;
};

// Runs every policy on the instance under common random numbers: the
// environment stream for (seed, run) is identical across policies, and
// episodes start from the all-inactive state. Policy construction failures
// are recorded per policy without aborting the rest.
ExperimentResult run_experiment(const Instance& inst,
                                const ExperimentConfig& cfg);

// Recomputes the per-policy summary from raw logs (the summary in
// ExperimentResult is produced this way).
std::vector<PolicySummary> summarize(const std::vector<EpisodeLog>& episodes,
                                     int n, int horizon);

std::string episodes_csv(const std::vector<EpisodeLog>& episodes);
nlohmann::json summary_json(const ExperimentResult& result,
                            const ExperimentConfig& cfg);

// ---------------------------------------------------------------------------
// Runtime scaling measurements: per-decision cost of sampled hill-climbing
// selection over growing graphs, and per-sweep cost of a full tabular
// Q-learning pass (one sampled update per state-action pair).
// ---------------------------------------------------------------------------
struct ScalingConfig {
  std::vector<int> hill_climb_sizes{25, 50, 100, 200};
  std::vector<int> tabular_sizes{8, 9, 10, 11, 12};
  int hill_climb_k = 10;
  int tabular_k = 2;
  int trials = 5;
  int lookahead_samples = 200;
  double avg_degree = 6.0;
  double cascade_w = 0.03;
  std::uint64_t seed = 0;
};

struct ScalingRow {
  std::string method;
  int n = 0;
  int k = 0;
  std::string measure;
  double value = 0.0;
};

std::vector<ScalingRow> runtime_scaling(const ScalingConfig& cfg);
std::string scaling_csv(const std::vector<ScalingRow>& rows);

}  // namespace nrmab
