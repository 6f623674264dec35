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

#include "nrmab/dynamics.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <stdexcept>

namespace nrmab {

std::uint64_t action_mask(std::span<const NodeId> action) {
  std::uint64_t m = 0;
  for (NodeId v : action) m |= std::uint64_t{1} << v;
  return m;
}

ActionList action_from_mask(std::uint64_t mask, int n) {
  ActionList a;
  for (int v = 0; v < n; ++v)
    if ((mask >> v) & 1u) a.push_back(v);
  return a;
}

Bitset action_indicator(int n, std::span<const NodeId> action) {
  Bitset b(n);
  for (NodeId v : action) b.set(v);
  return b;
}

double state_reward(const Instance& inst, const Bitset& s) {
  double total = 0.0;
  for (int v = 0; v < inst.n; ++v)
    if (s.get(v)) total += inst.rewards[v];
  return total;
}

double state_reward_encoded(const Instance& inst, std::uint64_t s) {
  double total = 0.0;
  while (s) {
    int v = std::countr_zero(s);
    total += inst.rewards[v];
    s &= s - 1;
  }
  return total;
}

StepSample sample_step(const Instance& inst, const Bitset& s,
                       std::span<const NodeId> action, Rng& rng) {
  const int n = inst.n;
  Bitset act = action_indicator(n, action);
  StepSample out{Bitset(n), Bitset(n)};
  for (int v = 0; v < n; ++v) {
    double p = inst.dynamics[v].activation_prob(s.get(v), act.get(v));
    if (chance(rng, p)) out.u.set(v);
  }
  out.next = out.u;
  const auto& adj = inst.adjacency();
  std::vector<NodeId> queue;
  queue.reserve(n);
  for (int v = 0; v < n; ++v)
    if (out.u.get(v)) queue.push_back(v);
  for (std::size_t qi = 0; qi < queue.size(); ++qi) {
    NodeId x = queue[qi];
    for (const auto& [nb, w] : adj[x]) {
      if (!out.next.get(nb) && chance(rng, w)) {
        out.next.set(nb);
        queue.push_back(nb);
      }
    }
  }
  return out;
}

CoinProfile sample_coin_profile(const Instance& inst, const Bitset& s,
                                Rng& rng) {
  const int n = inst.n;
  CoinProfile p{Bitset(n), Bitset(n),
                Bitset(static_cast<int>(inst.edges.size()))};
  for (int v = 0; v < n; ++v) {
    const bool sv = s.get(v);
    const double pp = inst.dynamics[v].activation_prob(sv, false);
    const double pa = inst.dynamics[v].activation_prob(sv, true);
    if (chance(rng, pp)) {
      p.x.set(v);
      p.y.set(v);  // coupling: passive success forces active success
    } else {
      const double denom = 1.0 - pp;
      const double residual = denom > 0.0 ? (pa - pp) / denom : 0.0;
      if (chance(rng, residual)) p.y.set(v);
    }
  }
  for (std::size_t e = 0; e < inst.edges.size(); ++e)
    if (chance(rng, inst.edges[e].weight)) p.z.set(static_cast<int>(e));
  return p;
}

Bitset apply_profile(const Instance& inst, const Bitset& s,
                     std::span<const NodeId> action,
                     const CoinProfile& profile) {
  (void)s;  // profile already encodes the state-dependent coin biases
  const int n = inst.n;
  Bitset act = action_indicator(n, action);
  Bitset active(n);
  for (int v = 0; v < n; ++v)
    if (act.get(v) ? profile.y.get(v) : profile.x.get(v)) active.set(v);
  // reachability over live edges, scan to fixpoint (exact-scale graphs)
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t e = 0; e < inst.edges.size(); ++e) {
      if (!profile.z.get(static_cast<int>(e))) continue;
      const bool au = active.get(inst.edges[e].u);
      const bool av = active.get(inst.edges[e].v);
      if (au != av) {
        active.set(au ? inst.edges[e].v : inst.edges[e].u);
        changed = true;
      }
    }
  }
  return active;
}

void enumerate_coin_profiles(
    const Instance& inst, const Bitset& s,
    const std::function<void(double, const CoinProfile&)>& fn) {
  const int n = inst.n;
  const int m = static_cast<int>(inst.edges.size());
  if (n > 20 || m > 20)
    throw std::invalid_argument("profile enumeration needs a tiny instance");
  // per-node probabilities of the three admissible (x,y) pairs
  std::vector<std::array<double, 3>> node_p(n);  // (0,0), (0,1), (1,1)
  for (int v = 0; v < n; ++v) {
    const bool sv = s.get(v);
    const double pp = inst.dynamics[v].activation_prob(sv, false);
    const double pa = inst.dynamics[v].activation_prob(sv, true);
    node_p[v] = {1.0 - pa, pa - pp, pp};
  }
  std::vector<double> edge_p(std::uint64_t{1} << m, 0.0);
  {
    double base = 1.0;
    for (const auto& e : inst.edges) base *= 1.0 - e.weight;
    edge_p[0] = base;
    for (std::uint64_t z = 1; z < edge_p.size(); ++z) {
      const int lb = std::countr_zero(z);
      const double w = inst.edges[lb].weight;
      edge_p[z] = edge_p[z & (z - 1)] * (w / (1.0 - w));
    }
  }
  CoinProfile profile{Bitset(n), Bitset(n), Bitset(m)};
  std::vector<int> combo(n, 0);
  while (true) {
    double pnode = 1.0;
    for (int v = 0; v < n; ++v) {
      pnode *= node_p[v][combo[v]];
      profile.x.set(v, combo[v] == 2);
      profile.y.set(v, combo[v] >= 1);
    }
    if (pnode > 0.0) {
      for (std::uint64_t z = 0; z < edge_p.size(); ++z) {
        for (int e = 0; e < m; ++e) profile.z.set(e, (z >> e) & 1u);
        const double p = pnode * edge_p[z];
        if (p > 0.0) fn(p, profile);
      }
    }
    int v = 0;
    while (v < n && combo[v] == 2) combo[v++] = 0;
    if (v == n) break;
    ++combo[v];
  }
}

ExactKernel::ExactKernel(const Instance& inst) : inst_(&inst) {
  if (inst.n > kMaxNodes)
    throw std::invalid_argument(
        "instance exceeds the exact enumeration cap of " +
        std::to_string(kMaxNodes) + " nodes; use the sampling API");
  if (static_cast<int>(inst.edges.size()) > kMaxEdges)
    throw std::invalid_argument(
        "instance exceeds the exact enumeration cap of " +
        std::to_string(kMaxEdges) + " edges; use the sampling API");
  const std::uint64_t states = num_states();
  state_reward_.resize(states, 0.0);
  for (std::uint64_t s = 1; s < states; ++s)
    state_reward_[s] =
        state_reward_[s & (s - 1)] + inst.rewards[std::countr_zero(s)];
  cascade_.resize(states);
}

void ExactKernel::ensure_edge_mask_probs() {
  if (!edge_mask_prob_.empty()) return;
  const int m = static_cast<int>(inst_->edges.size());
  edge_mask_prob_.resize(std::uint64_t{1} << m);
  double base = 1.0;
  for (const auto& e : inst_->edges) base *= 1.0 - e.weight;
  edge_mask_prob_[0] = base;
  for (std::uint64_t z = 1; z < edge_mask_prob_.size(); ++z) {
    const int lb = std::countr_zero(z);
    const double w = inst_->edges[lb].weight;
    edge_mask_prob_[z] = edge_mask_prob_[z & (z - 1)] * (w / (1.0 - w));
  }
}

ExactKernel::SparseDist ExactKernel::compute_cascade(std::uint64_t u) const {
  const std::uint64_t states = num_states();
  std::vector<double> dense(states, 0.0);
  const auto& edges = inst_->edges;
  const std::uint64_t zmax = std::uint64_t{1} << edges.size();
  for (std::uint64_t z = 0; z < zmax; ++z) {
    std::uint64_t active = u;
    bool changed = true;
    while (changed) {
      changed = false;
      for (std::size_t e = 0; e < edges.size(); ++e) {
        if (!((z >> e) & 1u)) continue;
        const std::uint64_t bu = std::uint64_t{1} << edges[e].u;
        const std::uint64_t bv = std::uint64_t{1} << edges[e].v;
        const bool au = active & bu;
        const bool av = active & bv;
        if (au != av) {
          active |= bu | bv;
          changed = true;
        }
      }
    }
    dense[active] += edge_mask_prob_[z];
  }
  SparseDist out;
  for (std::uint64_t sp = 0; sp < states; ++sp)
    if (dense[sp] > 0.0)
      out.emplace_back(static_cast<std::uint32_t>(sp), dense[sp]);
  return out;
}

const ExactKernel::SparseDist& ExactKernel::cascade_distribution(
    std::uint64_t u) {
  if (!cascade_[u]) {
    ensure_edge_mask_probs();
    cascade_[u] = std::make_unique<SparseDist>(compute_cascade(u));
  }
  return *cascade_[u];
}

void ExactKernel::precompute_cascades() {
  if (all_cascades_done_) return;
  const std::uint64_t work =
      num_states() << inst_->edges.size();
  if (work > kMaxPrecomputeWork)
    throw std::invalid_argument(
        "exact cascade table exceeds the work budget; use the sampling API");
  ensure_edge_mask_probs();
  const std::int64_t states = static_cast<std::int64_t>(num_states());
#pragma omp parallel for schedule(dynamic, 64)
  for (std::int64_t u = 0; u < states; ++u) {
    if (!cascade_[u])
      cascade_[u] = std::make_unique<SparseDist>(compute_cascade(u));
  }
  all_cascades_done_ = true;
}

std::vector<double> ExactKernel::transition_distribution(
    std::uint64_t s, std::uint64_t a_mask) const {
  const int n = inst_->n;
  std::vector<double> dist(num_states(), 0.0);
  dist[0] = 1.0;
  for (int v = 0; v < n; ++v) {
    const double p1 = inst_->dynamics[v].activation_prob((s >> v) & 1u,
                                                         (a_mask >> v) & 1u);
    const std::uint64_t block = std::uint64_t{1} << v;
    for (std::int64_t u = static_cast<std::int64_t>(block) - 1; u >= 0; --u) {
      const double base = dist[u];
      if (base == 0.0) continue;
      dist[u | block] = base * p1;
      dist[u] = base * (1.0 - p1);
    }
  }
  return dist;
}

std::vector<double> ExactKernel::full_kernel(std::uint64_t s,
                                             std::uint64_t a_mask) {
  std::vector<double> trans = transition_distribution(s, a_mask);
  std::vector<double> out(num_states(), 0.0);
  for (std::uint64_t u = 0; u < num_states(); ++u) {
    if (trans[u] == 0.0) continue;
    for (const auto& [sp, p] : cascade_distribution(u)) out[sp] += trans[u] * p;
  }
  return out;
}

std::vector<double> ExactKernel::cascade_expectation(
    std::span<const double> values) {
  precompute_cascades();
  const std::int64_t states = static_cast<std::int64_t>(num_states());
  std::vector<double> eu(states, 0.0);
#pragma omp parallel for schedule(static)
  for (std::int64_t u = 0; u < states; ++u) {
    double acc = 0.0;
    for (const auto& [sp, p] : *cascade_[u]) acc += p * values[sp];
    eu[u] = acc;
  }
  return eu;
}

double ExactKernel::expected_under_transition(std::uint64_t s,
                                              std::uint64_t a_mask,
                                              std::span<const double> eu) const {
  std::vector<double> trans = transition_distribution(s, a_mask);
  double acc = 0.0;
  for (std::uint64_t u = 0; u < trans.size(); ++u) acc += trans[u] * eu[u];
  return acc;
}

}  // namespace nrmab
