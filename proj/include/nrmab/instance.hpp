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
#include <unordered_map>
#include <vector>

#include <json.hpp>

namespace nrmab {

using NodeId = int;

struct Edge {
  NodeId u = 0;
  NodeId v = 0;
  double weight = 0.0;  // activation probability, in (0,1)
};

// Per-arm two-state transition table. Each entry is the probability of the
// arm being active after the transition step, indexed by (current state,
// action on the arm).
struct ArmDynamics {
  double p01_passive = 0.0;
  double p01_active = 0.0;
  double p11_passive = 0.0;
  double p11_active = 0.0;

  // P(next = 1 | state, acted)
  double activation_prob(bool state, bool acted) const {
    if (state) return acted ? p11_active : p11_passive;
    return acted ? p01_active : p01_passive;
  }

  friend bool operator==(const ArmDynamics&, const ArmDynamics&) = default;
};

// Full problem definition: graph, rewards, per-arm dynamics, budget and
// discount. Immutable after construction/validation; safe to share across
// threads.
struct Instance {
  int n = 0;
  std::vector<Edge> edges;
  std::vector<double> rewards;
  std::vector<ArmDynamics> dynamics;
  int budget_k = 1;
  double gamma = 0.0;
  std::vector<std::string> labels;  // original node labels, optional

  double max_reward_sum() const;
  // adjacency as (neighbor, edge weight) lists, built on demand
  const std::vector<std::vector<std::pair<NodeId, double>>>& adjacency() const;

  friend bool operator==(const Instance& a, const Instance& b) {
    return a.n == b.n && a.edges_equal(b) && a.rewards == b.rewards &&
           a.dynamics == b.dynamics && a.budget_k == b.budget_k &&
           a.gamma == b.gamma && a.labels == b.labels;
  }

 private:
  bool edges_equal(const Instance& b) const;
  mutable std::vector<std::vector<std::pair<NodeId, double>>> adj_;
};

inline bool operator==(const Edge& a, const Edge& b) {
  return a.u == b.u && a.v == b.v && a.weight == b.weight;
}

// Throws std::invalid_argument naming the first offending node/edge if any
// Instance invariant fails (Assumption 1, reward sign, budget, discount).
void validate_instance(const Instance& inst);

// Result of reading a raw edgelist: labels remapped to dense ids in
// first-appearance order, multigraph collapsed, self-loops dropped.
struct EdgelistGraph {
  int n = 0;
  std::vector<std::pair<NodeId, NodeId>> edges;
  std::vector<std::string> labels;                   // id -> raw label
  std::unordered_map<std::string, NodeId> label_ids; // raw label -> id
  int self_loops_dropped = 0;
  int duplicates_collapsed = 0;
};

// Parses line-oriented edgelist text: two whitespace-separated labels per
// line, '#' comment lines and blank lines skipped. Throws on malformed lines
// (message carries the line number) and on files with no edge lines.
EdgelistGraph ingest_edgelist(const std::string& text);
EdgelistGraph ingest_edgelist_file(const std::string& path);

// Combines a parsed graph with an attribute document (JSON) into a fully
// validated Instance. Recognized keys: n?, reward_default?, rewards?,
// dynamics_default, dynamics?, cascade_weight_default?, cascade_weights?,
// budget_k, gamma. Per-node keys are raw labels; per-edge keys are
// "<labelU> <labelV>".
Instance attach_attributes(const EdgelistGraph& graph,
                           const nlohmann::json& attrs);

// Parameters for synthetic instance generation. Exactly one of er_p /
// edge_count selects the edge model. Dynamics are sampled passive-first so
// Assumption 1 holds by construction.
struct GenSpec {
  int n = 0;
  double er_p = -1.0;   // Erdős–Rényi edge probability, if >= 0
  int edge_count = -1;  // explicit undirected edge count, if >= 0
  double reward_lo = 1.0, reward_hi = 1.0;
  double p01_passive_lo = 0.05, p01_passive_hi = 0.2;
  double p01_active_lo = 0.5, p01_active_hi = 0.9;
  double p11_passive_lo = 0.5, p11_passive_hi = 0.8;
  double p11_active_lo = 0.8, p11_active_hi = 0.99;
  double cascade_w = 0.05;
  int budget_k = 1;
  double gamma = 0.95;
};

Instance generate_synthetic(const GenSpec& spec, std::uint64_t seed);

// Canonical single-document serialization; loading the dump yields an equal
// Instance and dumping twice yields identical bytes.
nlohmann::json instance_to_json(const Instance& inst);
Instance instance_from_json(const nlohmann::json& doc);
std::string instance_to_string(const Instance& inst);
void save_instance(const Instance& inst, const std::string& path);
Instance load_instance(const std::string& path);

}  // namespace nrmab
