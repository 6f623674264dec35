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

#include "nrmab/instance.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "nrmab/rng.hpp"

namespace nrmab {

double Instance::max_reward_sum() const {
  double s = 0.0;
  for (double r : rewards) s += r;
  return s;
}

const std::vector<std::vector<std::pair<NodeId, double>>>&
Instance::adjacency() const {
  if (adj_.empty() && n > 0) {
    adj_.assign(n, {});
    for (const auto& e : edges) {
      adj_[e.u].emplace_back(e.v, e.weight);
      adj_[e.v].emplace_back(e.u, e.weight);
    }
  }
  return adj_;
}

bool Instance::edges_equal(const Instance& b) const {
  return edges == b.edges;
}

void validate_instance(const Instance& inst) {
  if (inst.n <= 0) throw std::invalid_argument("instance has no nodes");
  if (static_cast<int>(inst.rewards.size()) != inst.n)
    throw std::invalid_argument("rewards must cover every node");
  if (static_cast<int>(inst.dynamics.size()) != inst.n)
    throw std::invalid_argument("dynamics must cover every node");
  for (int v = 0; v < inst.n; ++v) {
    if (inst.rewards[v] < 0.0)
      throw std::invalid_argument("negative reward at node " +
                                  std::to_string(v));
    const auto& d = inst.dynamics[v];
    for (double p : {d.p01_passive, d.p01_active, d.p11_passive, d.p11_active})
      if (p < 0.0 || p > 1.0)
        throw std::invalid_argument("transition probability outside [0,1] at node " +
                                    std::to_string(v));
    if (d.p01_active < d.p01_passive || d.p11_active < d.p11_passive)
      throw std::invalid_argument(
          "active transition probabilities must dominate passive ones at node " +
          std::to_string(v));
  }
  std::set<std::pair<NodeId, NodeId>> seen;
  for (const auto& e : inst.edges) {
    if (e.u < 0 || e.u >= inst.n || e.v < 0 || e.v >= inst.n)
      throw std::invalid_argument("edge endpoint out of range");
    if (e.u == e.v)
      throw std::invalid_argument("self-loop at node " + std::to_string(e.u));
    if (e.weight <= 0.0 || e.weight >= 1.0)
      throw std::invalid_argument("cascade weight must be in (0,1) on edge " +
                                  std::to_string(e.u) + "-" +
                                  std::to_string(e.v));
    auto key = std::minmax(e.u, e.v);
    if (!seen.insert(key).second)
      throw std::invalid_argument("duplicate edge " + std::to_string(e.u) +
                                  "-" + std::to_string(e.v));
  }
  if (inst.budget_k < 1 || inst.budget_k > inst.n)
    throw std::invalid_argument("budget_k must be in [1, n]");
  if (inst.gamma < 0.0 || inst.gamma >= 1.0)
    throw std::invalid_argument("gamma must be in [0,1)");
  if (!inst.labels.empty() &&
      static_cast<int>(inst.labels.size()) != inst.n)
    throw std::invalid_argument("labels, when present, must cover every node");
}

EdgelistGraph ingest_edgelist(const std::string& text) {
  EdgelistGraph g;
  std::set<std::pair<NodeId, NodeId>> seen;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  bool saw_edge_line = false;
  auto id_of = [&g](const std::string& label) {
    auto it = g.label_ids.find(label);
    if (it != g.label_ids.end()) return it->second;
    NodeId id = g.n++;
    g.label_ids.emplace(label, id);
    g.labels.push_back(label);
    return id;
  };
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string a, b, extra;
    if (!(ls >> a)) continue;          // blank
    if (a[0] == '#') continue;         // comment
    if (!(ls >> b) || (ls >> extra))
      throw std::invalid_argument("edgelist line " + std::to_string(line_no) +
                                  ": expected exactly two node labels");
    saw_edge_line = true;
    NodeId u = id_of(a);
    NodeId v = id_of(b);
    if (u == v) {
      ++g.self_loops_dropped;
      continue;
    }
    auto key = std::minmax(u, v);
    if (!seen.insert(key).second) {
      ++g.duplicates_collapsed;
      continue;
    }
    g.edges.emplace_back(u, v);
  }
  if (!saw_edge_line)
    throw std::invalid_argument("edgelist contains no edge lines");
  return g;
}

EdgelistGraph ingest_edgelist_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open edgelist: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ingest_edgelist(ss.str());
}

namespace {

ArmDynamics dynamics_from_json(const nlohmann::json& j,
                               const std::string& where) {
  ArmDynamics d;
  for (const char* key :
       {"p01_passive", "p01_active", "p11_passive", "p11_active"})
    if (!j.contains(key))
      throw std::invalid_argument(where + ": missing key " + key);
  d.p01_passive = j.at("p01_passive").get<double>();
  d.p01_active = j.at("p01_active").get<double>();
  d.p11_passive = j.at("p11_passive").get<double>();
  d.p11_active = j.at("p11_active").get<double>();
  return d;
}

}  // namespace

Instance attach_attributes(const EdgelistGraph& graph,
                           const nlohmann::json& attrs) {
  std::vector<std::string> missing;
  if (!attrs.contains("dynamics_default") && !attrs.contains("dynamics"))
    missing.push_back("dynamics_default");
  if (!attrs.contains("cascade_weight_default") &&
      !attrs.contains("cascade_weights"))
    missing.push_back("cascade_weight_default");
  if (!attrs.contains("budget_k")) missing.push_back("budget_k");
  if (!attrs.contains("gamma")) missing.push_back("gamma");
  if (!missing.empty()) {
    std::string msg = "attribute document missing required keys:";
    for (const auto& m : missing) msg += " " + m;
    throw std::invalid_argument(msg);
  }

  Instance inst;
  inst.n = graph.n;
  if (attrs.contains("n") && attrs.at("n").get<int>() != graph.n)
    throw std::invalid_argument("attribute n does not match graph node count");
  inst.labels = graph.labels;

  const double reward_default = attrs.value("reward_default", 1.0);
  inst.rewards.assign(inst.n, reward_default);
  if (attrs.contains("rewards")) {
    for (auto it = attrs.at("rewards").begin(); it != attrs.at("rewards").end();
         ++it) {
      auto found = graph.label_ids.find(it.key());
      if (found == graph.label_ids.end())
        throw std::invalid_argument("rewards: unknown node label " + it.key());
      inst.rewards[found->second] = it.value().get<double>();
    }
  }

  ArmDynamics dyn_default{};
  bool have_default = attrs.contains("dynamics_default");
  if (have_default)
    dyn_default = dynamics_from_json(attrs.at("dynamics_default"),
                                     "dynamics_default");
  inst.dynamics.assign(inst.n, dyn_default);
  std::vector<bool> covered(inst.n, have_default);
  if (attrs.contains("dynamics")) {
    for (auto it = attrs.at("dynamics").begin(); it != attrs.at("dynamics").end();
         ++it) {
      auto found = graph.label_ids.find(it.key());
      if (found == graph.label_ids.end())
        throw std::invalid_argument("dynamics: unknown node label " + it.key());
      inst.dynamics[found->second] =
          dynamics_from_json(it.value(), "dynamics[" + it.key() + "]");
      covered[found->second] = true;
    }
  }
  for (int v = 0; v < inst.n; ++v)
    if (!covered[v])
      throw std::invalid_argument("no dynamics for node " + graph.labels[v]);

  const double w_default = attrs.value("cascade_weight_default", -1.0);
  std::map<std::pair<NodeId, NodeId>, double> per_edge;
  if (attrs.contains("cascade_weights")) {
    for (auto it = attrs.at("cascade_weights").begin();
         it != attrs.at("cascade_weights").end(); ++it) {
      std::istringstream ks(it.key());
      std::string a, b;
      if (!(ks >> a >> b))
        throw std::invalid_argument("cascade_weights: bad edge key '" +
                                    it.key() + "'");
      auto fa = graph.label_ids.find(a);
      auto fb = graph.label_ids.find(b);
      if (fa == graph.label_ids.end() || fb == graph.label_ids.end())
        throw std::invalid_argument("cascade_weights: unknown edge " + it.key());
      per_edge[std::minmax(fa->second, fb->second)] =
          it.value().get<double>();
    }
  }
  inst.edges.reserve(graph.edges.size());
  for (const auto& [u, v] : graph.edges) {
    auto it = per_edge.find(std::minmax(u, v));
    double w = it != per_edge.end() ? it->second : w_default;
    if (w < 0.0)
      throw std::invalid_argument("no cascade weight for edge " +
                                  graph.labels[u] + " " + graph.labels[v]);
    inst.edges.push_back({u, v, w});
  }

  inst.budget_k = attrs.at("budget_k").get<int>();
  inst.gamma = attrs.at("gamma").get<double>();

  // re-surface Assumption 1 violations with the raw label
  for (int v = 0; v < inst.n; ++v) {
    const auto& d = inst.dynamics[v];
    if (d.p01_active < d.p01_passive || d.p11_active < d.p11_passive)
      throw std::invalid_argument(
          "active transition probabilities must dominate passive ones at node " +
          graph.labels[v]);
  }
  validate_instance(inst);
  return inst;
}

Instance generate_synthetic(const GenSpec& spec, std::uint64_t seed) {
  if (spec.n <= 0) throw std::invalid_argument("generator: n must be positive");
  if (spec.budget_k < 1 || spec.budget_k > spec.n)
    throw std::invalid_argument("generator: budget_k must be in [1, n]");
  if (spec.gamma < 0.0 || spec.gamma >= 1.0)
    throw std::invalid_argument("generator: gamma must be in [0,1)");
  if (spec.cascade_w <= 0.0 || spec.cascade_w >= 1.0)
    throw std::invalid_argument("generator: cascade weight must be in (0,1)");
  auto check_range = [](double lo, double hi, const char* name) {
    if (lo < 0.0 || hi > 1.0 || lo > hi)
      throw std::invalid_argument(std::string("generator: bad range for ") +
                                  name);
  };
  check_range(spec.p01_passive_lo, spec.p01_passive_hi, "p01_passive");
  check_range(spec.p01_active_lo, spec.p01_active_hi, "p01_active");
  check_range(spec.p11_passive_lo, spec.p11_passive_hi, "p11_passive");
  check_range(spec.p11_active_lo, spec.p11_active_hi, "p11_active");
  if (spec.p01_active_hi < spec.p01_passive_hi ||
      spec.p11_active_hi < spec.p11_passive_hi)
    throw std::invalid_argument(
        "generator: active range must extend at least to the passive range");
  if (spec.reward_lo < 0.0 || spec.reward_lo > spec.reward_hi)
    throw std::invalid_argument("generator: bad reward range");
  const long long max_edges =
      static_cast<long long>(spec.n) * (spec.n - 1) / 2;
  if ((spec.er_p >= 0.0) == (spec.edge_count >= 0))
    throw std::invalid_argument(
        "generator: specify exactly one of er_p / edge_count");
  if (spec.er_p > 1.0)
    throw std::invalid_argument("generator: er_p must be in [0,1]");
  if (spec.edge_count > max_edges)
    throw std::invalid_argument("generator: edge_count exceeds simple-graph cap");

  Rng rng = make_rng(seed, {0x67656e /* gen */});
  Instance inst;
  inst.n = spec.n;
  inst.budget_k = spec.budget_k;
  inst.gamma = spec.gamma;

  auto sample_in = [&rng](double lo, double hi) {
    return lo + (hi - lo) * uniform01(rng);
  };
  inst.rewards.reserve(spec.n);
  inst.dynamics.reserve(spec.n);
  for (int v = 0; v < spec.n; ++v) {
    inst.rewards.push_back(sample_in(spec.reward_lo, spec.reward_hi));
    ArmDynamics d;
    d.p01_passive = sample_in(spec.p01_passive_lo, spec.p01_passive_hi);
    d.p01_active =
        sample_in(std::max(spec.p01_active_lo, d.p01_passive),
                  spec.p01_active_hi);
    d.p11_passive = sample_in(spec.p11_passive_lo, spec.p11_passive_hi);
    d.p11_active =
        sample_in(std::max(spec.p11_active_lo, d.p11_passive),
                  spec.p11_active_hi);
    inst.dynamics.push_back(d);
  }

  if (spec.er_p >= 0.0) {
    for (NodeId u = 0; u < spec.n; ++u)
      for (NodeId v = u + 1; v < spec.n; ++v)
        if (chance(rng, spec.er_p)) inst.edges.push_back({u, v, spec.cascade_w});
  } else {
    std::set<std::pair<NodeId, NodeId>> chosen;
    while (static_cast<int>(chosen.size()) < spec.edge_count) {
      NodeId u = static_cast<NodeId>(rand_below(rng, spec.n));
      NodeId v = static_cast<NodeId>(rand_below(rng, spec.n));
      if (u == v) continue;
      chosen.insert(std::minmax(u, v));
    }
    for (const auto& [u, v] : chosen)
      inst.edges.push_back({u, v, spec.cascade_w});
  }

  validate_instance(inst);
  return inst;
}

nlohmann::json instance_to_json(const Instance& inst) {
  nlohmann::json doc;
  doc["format"] = "nrmab-instance-v1";
  doc["n"] = inst.n;
  doc["budget_k"] = inst.budget_k;
  doc["gamma"] = inst.gamma;
  doc["rewards"] = inst.rewards;
  nlohmann::json edges = nlohmann::json::array();
  for (const auto& e : inst.edges)
    edges.push_back({{"u", e.u}, {"v", e.v}, {"w", e.weight}});
  doc["edges"] = edges;
  nlohmann::json dyn = nlohmann::json::array();
  for (const auto& d : inst.dynamics)
    dyn.push_back({{"p01_passive", d.p01_passive},
                   {"p01_active", d.p01_active},
                   {"p11_passive", d.p11_passive},
                   {"p11_active", d.p11_active}});
  doc["dynamics"] = dyn;
  if (!inst.labels.empty()) doc["labels"] = inst.labels;
  return doc;
}

Instance instance_from_json(const nlohmann::json& doc) {
  if (doc.value("format", "") != "nrmab-instance-v1")
    throw std::invalid_argument("not an nrmab instance document");
  Instance inst;
  inst.n = doc.at("n").get<int>();
  inst.budget_k = doc.at("budget_k").get<int>();
  inst.gamma = doc.at("gamma").get<double>();
  inst.rewards = doc.at("rewards").get<std::vector<double>>();
  for (const auto& e : doc.at("edges"))
    inst.edges.push_back({e.at("u").get<NodeId>(), e.at("v").get<NodeId>(),
                          e.at("w").get<double>()});
  for (const auto& d : doc.at("dynamics"))
    inst.dynamics.push_back(dynamics_from_json(d, "dynamics"));
  if (doc.contains("labels"))
    inst.labels = doc.at("labels").get<std::vector<std::string>>();
  validate_instance(inst);
  return inst;
}

std::string instance_to_string(const Instance& inst) {
  return instance_to_json(inst).dump(2) + "\n";
}

void save_instance(const Instance& inst, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot write instance: " + path);
  out << instance_to_string(inst);
}

Instance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open instance: " + path);
  nlohmann::json doc;
  in >> doc;
  return instance_from_json(doc);
}

}  // namespace nrmab
