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

#include "nrmab/planning.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace nrmab {

ExactQ::ExactQ(ExactKernel& kernel, std::span<const double> values)
    : kernel_(&kernel), eu_(kernel.cascade_expectation(values)) {}

double ExactQ::q(std::uint64_t s, std::uint64_t a_mask) const {
  const double gamma = kernel_->instance().gamma;
  return kernel_->state_reward(s) +
         gamma * kernel_->expected_under_transition(s, a_mask, eu_);
}

double q_exact(ExactKernel& kernel, std::span<const double> values,
               std::uint64_t s, std::uint64_t a_mask) {
  return ExactQ(kernel, values).q(s, a_mask);
}

// ---------------------------------------------------------------------------
// Sessions
// ---------------------------------------------------------------------------
namespace {

class ExactQSession final : public QSession {
 public:
  ExactQSession(const ExactQ& q, std::uint64_t s) : q_(&q), s_(s) {}
  double value_current() override { return q_->q(s_, mask_); }
  double value_with(NodeId v) override {
    return q_->q(s_, mask_ | (std::uint64_t{1} << v));
  }
  void commit(NodeId v) override { mask_ |= std::uint64_t{1} << v; }

 private:
  const ExactQ* q_;
  std::uint64_t s_;
  std::uint64_t mask_ = 0;
};

class SampledVSession final : public QSession {
 public:
  SampledVSession(const Instance& inst, std::span<const double> values,
                  int samples, const Bitset& s, Rng& rng)
      : inst_(&inst), values_(values), s_(s) {
    profiles_.reserve(samples);
    for (int i = 0; i < samples; ++i)
      profiles_.push_back(sample_coin_profile(inst, s, rng));
  }
  double value_current() override { return evaluate(committed_); }
  double value_with(NodeId v) override {
    ActionList with = committed_;
    with.push_back(v);
    return evaluate(with);
  }
  void commit(NodeId v) override { committed_.push_back(v); }

 private:
  double evaluate(const ActionList& action) const {
    double acc = 0.0;
    for (const auto& p : profiles_) {
      Bitset next = apply_profile(*inst_, s_, action, p);
      acc += values_[next.encoded()];
    }
    return state_reward(*inst_, s_) +
           inst_->gamma * acc / static_cast<double>(profiles_.size());
  }

  const Instance* inst_;
  std::span<const double> values_;
  Bitset s_;
  std::vector<CoinProfile> profiles_;
  ActionList committed_;
};

// Per-profile sampled step data: node coins, live-edge CSR adjacency, and
// the cascade closure of the committed action set.
struct StepProfile {
  Bitset x, y;
  std::vector<int> offsets;      // CSR over nodes
  std::vector<NodeId> targets;   // live directed edges
  Bitset closure;                // reachable set for the committed action
  double closure_reward = 0.0;
};

StepProfile draw_step_profile(const Instance& inst, const Bitset& s,
                              Rng& rng) {
  const int n = inst.n;
  StepProfile p{Bitset(n), Bitset(n), {}, {}, Bitset(n), 0.0};
  for (int v = 0; v < n; ++v) {
    const bool sv = s.get(v);
    const double pp = inst.dynamics[v].activation_prob(sv, false);
    const double pa = inst.dynamics[v].activation_prob(sv, true);
    if (chance(rng, pp)) {
      p.x.set(v);
      p.y.set(v);
    } else {
      const double denom = 1.0 - pp;
      const double residual = denom > 0.0 ? (pa - pp) / denom : 0.0;
      if (chance(rng, residual)) p.y.set(v);
    }
  }
  std::vector<int> degree(n, 0);
  std::vector<std::pair<NodeId, NodeId>> live;
  live.reserve(inst.edges.size() / 8 + 4);
  for (const auto& e : inst.edges) {
    if (chance(rng, e.weight)) {
      live.emplace_back(e.u, e.v);
      ++degree[e.u];
      ++degree[e.v];
    }
  }
  p.offsets.assign(n + 1, 0);
  for (int v = 0; v < n; ++v) p.offsets[v + 1] = p.offsets[v] + degree[v];
  p.targets.resize(p.offsets[n]);
  std::vector<int> cursor(p.offsets.begin(), p.offsets.end() - 1);
  for (const auto& [a, b] : live) {
    p.targets[cursor[a]++] = b;
    p.targets[cursor[b]++] = a;
  }
  return p;
}

// Reachable set from `frontier` over the profile's live edges, stopping at
// nodes already in `profile.closure` or previously collected. Returns the
// newly reached nodes.
void closure_expand(const Instance& inst, StepProfile& p,
                    std::vector<NodeId>& frontier_stack, Bitset& scratch,
                    std::vector<NodeId>& out) {
  out.clear();
  while (!frontier_stack.empty()) {
    NodeId x = frontier_stack.back();
    frontier_stack.pop_back();
    out.push_back(x);
    for (int i = p.offsets[x]; i < p.offsets[x + 1]; ++i) {
      NodeId nb = p.targets[i];
      if (!p.closure.get(nb) && !scratch.get(nb)) {
        scratch.set(nb);
        frontier_stack.push_back(nb);
      }
    }
  }
  (void)inst;
}

// Initializes the committed closure from the passive coin outcomes.
void init_closure(const Instance& inst, StepProfile& p) {
  std::vector<NodeId> stack;
  Bitset scratch(inst.n);
  for (int v = 0; v < inst.n; ++v)
    if (p.x.get(v) && !scratch.get(v)) {
      scratch.set(v);
      stack.push_back(v);
    }
  std::vector<NodeId> reached;
  closure_expand(inst, p, stack, scratch, reached);
  for (NodeId v : reached) {
    p.closure.set(v);
    p.closure_reward += inst.rewards[v];
  }
}

// Marginal nodes contributed by adding `v` to the committed set under this
// profile; empty unless the action flips the arm's transition outcome and v
// is not already reached.
void marginal_of(const Instance& inst, StepProfile& p, NodeId v,
                 Bitset& scratch, std::vector<NodeId>& out) {
  out.clear();
  if (!p.y.get(v) || p.x.get(v) || p.closure.get(v)) return;
  std::vector<NodeId> stack{v};
  scratch.set(v);
  closure_expand(inst, p, stack, scratch, out);
  for (NodeId w : out) scratch.set(w, false);
}

class OneStepSampledSession final : public QSession {
 public:
  OneStepSampledSession(const Instance& inst, int samples, bool naive,
                        const Bitset& s, Rng& rng)
      : inst_(&inst), s_(s), naive_(naive), scratch_(inst.n) {
    profiles_.reserve(samples);
    for (int i = 0; i < samples; ++i) {
      profiles_.push_back(draw_step_profile(inst, s, rng));
      init_closure(inst, profiles_.back());
    }
  }

  double value_current() override {
    if (naive_) return naive_value(committed_);
    double acc = 0.0;
    for (const auto& p : profiles_) acc += p.closure_reward;
    return acc / static_cast<double>(profiles_.size());
  }

  double value_with(NodeId v) override {
    if (naive_) {
      ActionList with = committed_;
      with.push_back(v);
      return naive_value(with);
    }
    double acc = 0.0;
    std::vector<NodeId> gained;
    for (auto& p : profiles_) {
      double m = 0.0;
      marginal_of(*inst_, p, v, scratch_, gained);
      for (NodeId w : gained) m += inst_->rewards[w];
      acc += p.closure_reward + m;
    }
    return acc / static_cast<double>(profiles_.size());
  }

  void commit(NodeId v) override {
    committed_.push_back(v);
    std::vector<NodeId> gained;
    for (auto& p : profiles_) {
      marginal_of(*inst_, p, v, scratch_, gained);
      for (NodeId w : gained) {
        p.closure.set(w);
        p.closure_reward += inst_->rewards[w];
      }
    }
  }

 private:
  double naive_value(const ActionList& action) const {
    Bitset act = action_indicator(inst_->n, action);
    double acc = 0.0;
    for (const auto& p : profiles_) {
      Bitset active(inst_->n);
      std::vector<NodeId> queue;
      for (int v = 0; v < inst_->n; ++v)
        if (act.get(v) ? p.y.get(v) : p.x.get(v)) {
          active.set(v);
          queue.push_back(v);
        }
      for (std::size_t qi = 0; qi < queue.size(); ++qi) {
        NodeId xnode = queue[qi];
        for (int i = p.offsets[xnode]; i < p.offsets[xnode + 1]; ++i) {
          NodeId nb = p.targets[i];
          if (!active.get(nb)) {
            active.set(nb);
            queue.push_back(nb);
          }
        }
      }
      acc += state_reward(*inst_, active);
    }
    return acc / static_cast<double>(profiles_.size());
  }

  const Instance* inst_;
  Bitset s_;
  bool naive_;
  Bitset scratch_;
  std::vector<StepProfile> profiles_;
  ActionList committed_;
};

class OneStepExactSession final : public QSession {
 public:
  OneStepExactSession(ExactKernel& kernel, std::span<const double> eu,
                      std::uint64_t s)
      : kernel_(&kernel), eu_(eu), s_(s) {}
  double value_current() override {
    return kernel_->expected_under_transition(s_, mask_, eu_);
  }
  double value_with(NodeId v) override {
    return kernel_->expected_under_transition(
        s_, mask_ | (std::uint64_t{1} << v), eu_);
  }
  void commit(NodeId v) override { mask_ |= std::uint64_t{1} << v; }

 private:
  ExactKernel* kernel_;
  std::span<const double> eu_;
  std::uint64_t s_;
  std::uint64_t mask_ = 0;
};

class RolloutSession final : public QSession {
 public:
  RolloutSession(const Instance& inst, const PolicyFn& base, int horizon,
                 int rollouts, const Bitset& s, Rng& rng)
      : inst_(&inst), base_(&base), horizon_(horizon), s_(s),
        scratch_(inst.n) {
    profiles_.reserve(rollouts);
    seeds_.reserve(rollouts);
    for (int i = 0; i < rollouts; ++i) {
      profiles_.push_back(draw_step_profile(inst, s, rng));
      init_closure(inst, profiles_.back());
      seeds_.push_back(rng());
    }
    committed_returns_.resize(rollouts);
    for (int i = 0; i < rollouts; ++i)
      committed_returns_[i] = continuation(profiles_[i].closure, seeds_[i]);
  }

  double value_current() override {
    double acc = 0.0;
    for (double g : committed_returns_) acc += g;
    return state_reward(*inst_, s_) +
           acc / static_cast<double>(profiles_.size());
  }

  double value_with(NodeId v) override {
    double acc = 0.0;
    std::vector<NodeId> gained;
    for (std::size_t i = 0; i < profiles_.size(); ++i) {
      marginal_of(*inst_, profiles_[i], v, scratch_, gained);
      if (gained.empty()) {
        acc += committed_returns_[i];
      } else {
        Bitset next = profiles_[i].closure;
        for (NodeId w : gained) next.set(w);
        acc += continuation(next, seeds_[i]);
      }
    }
    return state_reward(*inst_, s_) +
           acc / static_cast<double>(profiles_.size());
  }

  void commit(NodeId v) override {
    std::vector<NodeId> gained;
    for (std::size_t i = 0; i < profiles_.size(); ++i) {
      marginal_of(*inst_, profiles_[i], v, scratch_, gained);
      if (gained.empty()) continue;
      for (NodeId w : gained) {
        profiles_[i].closure.set(w);
        profiles_[i].closure_reward += inst_->rewards[w];
      }
      committed_returns_[i] = continuation(profiles_[i].closure, seeds_[i]);
    }
  }

 private:
  // sum_{h=1..H-1} gamma^h R(s_h) with s_1 = first-step outcome; the seed
  // is fixed per rollout index so candidates share continuation noise.
  double continuation(const Bitset& s1, std::uint64_t seed) const {
    Rng rng(seed);
    Bitset cur = s1;
    double disc = inst_->gamma;
    double total = 0.0;
    for (int h = 1; h < horizon_; ++h) {
      total += disc * state_reward(*inst_, cur);
      if (h + 1 < horizon_) {
        ActionList a = (*base_)(cur, rng);
        cur = sample_step(*inst_, cur, a, rng).next;
      }
      disc *= inst_->gamma;
    }
    return total;
  }

  const Instance* inst_;
  const PolicyFn* base_;
  int horizon_;
  Bitset s_;
  Bitset scratch_;
  std::vector<StepProfile> profiles_;
  std::vector<std::uint64_t> seeds_;
  std::vector<double> committed_returns_;
};

}  // namespace

ExactQEvaluator::ExactQEvaluator(ExactKernel& kernel, ValueTable values)
    : kernel_(&kernel), values_(std::move(values)) {
  q_ = std::make_unique<ExactQ>(*kernel_, values_);
}

std::unique_ptr<QSession> ExactQEvaluator::begin(const Bitset& s, Rng& rng) {
  (void)rng;
  return std::make_unique<ExactQSession>(*q_, s.encoded());
}

SampledVEvaluator::SampledVEvaluator(const Instance& inst, ValueTable values,
                                     int samples)
    : inst_(&inst), values_(std::move(values)), samples_(samples) {
  if (inst.n > 64)
    throw std::invalid_argument("value-table evaluation needs n <= 64");
  if (samples < 1) throw std::invalid_argument("samples must be positive");
  inst.adjacency();
}

std::unique_ptr<QSession> SampledVEvaluator::begin(const Bitset& s, Rng& rng) {
  return std::make_unique<SampledVSession>(*inst_, values_, samples_, s, rng);
}

OneStepRewardEvaluator::OneStepRewardEvaluator(const Instance& inst, Mode mode,
                                               int samples, Impl impl)
    : inst_(&inst), mode_(mode), samples_(samples), impl_(impl) {
  if (mode == Mode::sampled && samples < 1)
    throw std::invalid_argument("samples must be positive");
  inst.adjacency();
  if (mode == Mode::exact) {
    kernel_ = std::make_unique<ExactKernel>(inst);
    std::vector<double> rewards(kernel_->num_states());
    for (std::uint64_t sp = 0; sp < rewards.size(); ++sp)
      rewards[sp] = kernel_->state_reward(sp);
    next_reward_eu_ = kernel_->cascade_expectation(rewards);
  }
}

std::unique_ptr<QSession> OneStepRewardEvaluator::begin(const Bitset& s,
                                                        Rng& rng) {
  if (mode_ == Mode::exact)
    return std::make_unique<OneStepExactSession>(*kernel_, next_reward_eu_,
                                                 s.encoded());
  return std::make_unique<OneStepSampledSession>(
      *inst_, samples_, impl_ == Impl::naive, s, rng);
}

RolloutQEvaluator::RolloutQEvaluator(const Instance& inst, PolicyFn base_policy,
                                     int horizon, int rollouts)
    : inst_(&inst), base_(std::move(base_policy)), horizon_(horizon),
      rollouts_(rollouts) {
  if (horizon < 1 || rollouts < 1)
    throw std::invalid_argument("rollout horizon and count must be positive");
  inst.adjacency();
}

std::unique_ptr<QSession> RolloutQEvaluator::begin(const Bitset& s, Rng& rng) {
  return std::make_unique<RolloutSession>(*inst_, base_, horizon_, rollouts_,
                                          s, rng);
}

// ---------------------------------------------------------------------------
// Greedy selection
// ---------------------------------------------------------------------------
HillClimbResult hill_climb_select(int n, int k, QSession& session) {
  HillClimbResult res;
  std::vector<char> in_set(n, 0);
  double current = session.value_current();
  for (int pass = 0; pass < k; ++pass) {
    double best = -std::numeric_limits<double>::infinity();
    NodeId best_v = -1;
    for (NodeId v = 0; v < n; ++v) {
      if (in_set[v]) continue;
      const double val = session.value_with(v);
      ++res.evaluations;
      if (val > best) {
        best = val;
        best_v = v;
      }
    }
    if (best_v < 0 || best <= current) break;  // non-positive marginal gain
    session.commit(best_v);
    in_set[best_v] = 1;
    res.pick_order.push_back(best_v);
    res.value_trace.push_back(best);
    current = best;
  }
  res.action = res.pick_order;
  std::sort(res.action.begin(), res.action.end());
  res.value = current;
  return res;
}

// ---------------------------------------------------------------------------
// Bellman operators
// ---------------------------------------------------------------------------
namespace {

struct ExactGreedy {
  std::uint64_t mask = 0;
  double value = 0.0;
};

ExactGreedy exact_greedy(const ExactQ& q, int n, int k, std::uint64_t s) {
  ExactGreedy res;
  res.value = q.q(s, 0);
  for (int pass = 0; pass < k; ++pass) {
    double best = -std::numeric_limits<double>::infinity();
    int best_v = -1;
    for (int v = 0; v < n; ++v) {
      const std::uint64_t bit = std::uint64_t{1} << v;
      if (res.mask & bit) continue;
      const double val = q.q(s, res.mask | bit);
      if (val > best) {
        best = val;
        best_v = v;
      }
    }
    if (best_v < 0 || best <= res.value) break;
    res.mask |= std::uint64_t{1} << best_v;
    res.value = best;
  }
  return res;
}

void lex_masks(int n, int k, int start, std::uint64_t cur, int size,
               std::vector<std::uint64_t>& out) {
  out.push_back(cur);
  if (size == k) return;
  for (int v = start; v < n; ++v)
    lex_masks(n, k, v + 1, cur | (std::uint64_t{1} << v), size + 1, out);
}

}  // namespace

std::vector<std::uint64_t> feasible_action_masks(int n, int k) {
  std::vector<std::uint64_t> out;
  lex_masks(n, k, 0, 0, 0, out);
  return out;
}

ValueTable bellman_hc(ExactKernel& kernel, std::span<const double> values,
                      const SweepOptions& opts) {
  const ExactQ q(kernel, values);
  const Instance& inst = kernel.instance();
  const std::int64_t states = static_cast<std::int64_t>(kernel.num_states());
  ValueTable out(states, 0.0);
#pragma omp parallel for schedule(dynamic, 16) if (opts.parallel)
  for (std::int64_t s = 0; s < states; ++s)
    out[s] = exact_greedy(q, inst.n, inst.budget_k, s).value;
  return out;
}

ValueTable bellman_opt(ExactKernel& kernel, std::span<const double> values,
                       const SweepOptions& opts) {
  const ExactQ q(kernel, values);
  const Instance& inst = kernel.instance();
  const auto masks = feasible_action_masks(inst.n, inst.budget_k);
  const std::int64_t states = static_cast<std::int64_t>(kernel.num_states());
  ValueTable out(states, 0.0);
#pragma omp parallel for schedule(dynamic, 16) if (opts.parallel)
  for (std::int64_t s = 0; s < states; ++s) {
    double best = -std::numeric_limits<double>::infinity();
    for (std::uint64_t m : masks) {
      const double val = q.q(s, m);
      if (val > best) best = val;
    }
    out[s] = best;
  }
  return out;
}

ValueTable apply_bellman(ExactKernel& kernel, BellmanOperator op,
                         std::span<const double> values,
                         const SweepOptions& opts) {
  return op == BellmanOperator::hill_climb ? bellman_hc(kernel, values, opts)
                                           : bellman_opt(kernel, values, opts);
}

std::vector<std::uint64_t> bellman_hc_actions(ExactKernel& kernel,
                                              std::span<const double> values) {
  const ExactQ q(kernel, values);
  const Instance& inst = kernel.instance();
  std::vector<std::uint64_t> out(kernel.num_states(), 0);
  for (std::uint64_t s = 0; s < out.size(); ++s)
    out[s] = exact_greedy(q, inst.n, inst.budget_k, s).mask;
  return out;
}

std::vector<std::uint64_t> bellman_opt_actions(ExactKernel& kernel,
                                               std::span<const double> values) {
  const ExactQ q(kernel, values);
  const Instance& inst = kernel.instance();
  const auto masks = feasible_action_masks(inst.n, inst.budget_k);
  std::vector<std::uint64_t> out(kernel.num_states(), 0);
  for (std::uint64_t s = 0; s < out.size(); ++s) {
    double best = -std::numeric_limits<double>::infinity();
    std::uint64_t best_mask = 0;
    for (std::uint64_t m : masks) {
      const double val = q.q(s, m);
      if (val > best) {
        best = val;
        best_mask = m;
      }
    }
    out[s] = best_mask;
  }
  return out;
}

ValueIterationResult value_iteration(ExactKernel& kernel, BellmanOperator op,
                                     ValueTable v0, double tol, int max_iters,
                                     const SweepOptions& opts) {
  if (v0.size() != kernel.num_states())
    throw std::invalid_argument("value table size must be 2^n");
  ValueIterationResult res;
  res.values = std::move(v0);
  for (int it = 0; it < max_iters; ++it) {
    ValueTable next = apply_bellman(kernel, op, res.values, opts);
    double delta = 0.0;
    for (std::size_t s = 0; s < next.size(); ++s)
      delta = std::max(delta, std::abs(next[s] - res.values[s]));
    res.values = std::move(next);
    res.deltas.push_back(delta);
    res.iterations = it + 1;
    if (delta <= tol) {
      res.converged = true;
      break;
    }
  }
  return res;
}

// ---------------------------------------------------------------------------
// Multi-Bellman decomposition
// ---------------------------------------------------------------------------
double meta_discount(const Instance& inst) {
  if (inst.gamma == 0.0) return 0.0;
  return std::pow(inst.gamma, 1.0 / inst.budget_k);
}

namespace {

// R(s, A): the immediate reward of taking action set A in state s. The
// reward counts active nodes only, so the action set does not enter; both
// evaluations are kept explicit because the meta reward is defined as their
// difference.
double action_set_reward(const Instance& inst, std::uint64_t s,
                         std::uint64_t a_mask) {
  (void)a_mask;
  return state_reward_encoded(inst, s);
}

}  // namespace

double meta_reward(const Instance& inst, std::uint64_t s,
                   std::uint64_t partial_mask, NodeId v, int t) {
  const double with =
      action_set_reward(inst, s, partial_mask | (std::uint64_t{1} << v));
  const double without = action_set_reward(inst, s, partial_mask);
  const double diff = with - without;
  const double gt = meta_discount(inst);
  if (t == 0) return diff;
  if (gt == 0.0) return 0.0;  // its gamma_tilde^t coefficient vanishes anyway
  return diff / std::pow(gt, t);
}

double multi_bellman_step(ExactKernel& kernel, const MetaValueFn& extended,
                          const MetaState& meta) {
  const Instance& inst = kernel.instance();
  const int k = inst.budget_k;
  if (meta.t > k)
    throw std::invalid_argument("meta-state step counter exceeds the budget");
  const double gt = meta_discount(inst);
  if (meta.t == k) {
    // transition form: apply the built set through the full kernel
    const auto dist = kernel.full_kernel(meta.s, meta.action_mask);
    double acc = 0.0;
    for (std::uint64_t sp = 0; sp < dist.size(); ++sp)
      if (dist[sp] > 0.0) acc += dist[sp] * extended(sp, 0, 0);
    return gt * acc;
  }
  double best = -std::numeric_limits<double>::infinity();
  for (int v = 0; v < inst.n; ++v) {
    const std::uint64_t bit = std::uint64_t{1} << v;
    if (meta.action_mask & bit) continue;
    const double val =
        meta_reward(inst, meta.s, meta.action_mask, v, meta.t) +
        gt * extended(meta.s, meta.action_mask | bit, meta.t + 1);
    if (val > best) best = val;
  }
  return best;
}

MetaComposite multi_bellman_composite(ExactKernel& kernel,
                                      std::span<const double> values,
                                      std::uint64_t s) {
  const Instance& inst = kernel.instance();
  const int k = inst.budget_k;
  const double gt = meta_discount(inst);
  const ExactQ q(kernel, values);

  MetaComposite res;
  double value = kernel.state_reward(s);  // R(s, {}) base term
  std::uint64_t mask = 0;
  double discount = 1.0;  // gamma_tilde^t
  double current_q = q.q(s, 0);
  bool stopped = false;
  for (int t = 0; t < k; ++t) {
    if (!stopped) {
      double best = -std::numeric_limits<double>::infinity();
      int best_v = -1;
      for (int v = 0; v < inst.n; ++v) {
        const std::uint64_t bit = std::uint64_t{1} << v;
        if (mask & bit) continue;
        const double val = q.q(s, mask | bit);
        if (val > best) {
          best = val;
          best_v = v;
        }
      }
      if (best_v < 0 || best <= current_q) {
        stopped = true;  // remaining selection steps are zero-marginal no-ops
      } else {
        const double term =
            discount * meta_reward(inst, s, mask, best_v, t);
        res.reward_terms.push_back(term);
        value += term;
        mask |= std::uint64_t{1} << best_v;
        res.action.push_back(best_v);
        current_q = best;
      }
    }
    discount *= gt;  // one factor per selection level; the k-th one belongs
                     // to the transition form
  }
  std::vector<double> eu = kernel.cascade_expectation(values);
  value += discount * kernel.expected_under_transition(s, mask, eu);
  std::sort(res.action.begin(), res.action.end());
  res.value = value;
  return res;
}

// ---------------------------------------------------------------------------
// Rollout Q and value-table IO
// ---------------------------------------------------------------------------
double rollout_q(const Instance& inst, const Bitset& s,
                 std::span<const NodeId> action, const PolicyFn& base_policy,
                 int horizon, int rollouts, Rng& rng) {
  if (horizon < 1) throw std::invalid_argument("rollout horizon must be >= 1");
  if (rollouts < 1) throw std::invalid_argument("rollout count must be >= 1");
  inst.adjacency();
  double acc = 0.0;
  for (int i = 0; i < rollouts; ++i) {
    Bitset cur = s;
    double disc = 1.0;
    double total = 0.0;
    for (int h = 0; h < horizon; ++h) {
      total += disc * state_reward(inst, cur);
      if (h + 1 < horizon) {
        ActionList a = h == 0 ? ActionList(action.begin(), action.end())
                              : base_policy(cur, rng);
        cur = sample_step(inst, cur, a, rng).next;
      }
      disc *= inst.gamma;
    }
    acc += total;
  }
  return acc / rollouts;
}

void save_value_table(std::span<const double> values,
                      const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot write value table: " + path);
  char buf[64];
  for (std::size_t s = 0; s < values.size(); ++s) {
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), values[s]);
    out << s << ' ' << std::string_view(buf, p - buf) << '\n';
  }
}

ValueTable load_value_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open value table: " + path);
  ValueTable out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::size_t idx;
    std::string val;
    ls >> idx >> val;
    double d = 0.0;
    std::from_chars(val.data(), val.data() + val.size(), d);
    if (out.size() <= idx) out.resize(idx + 1, 0.0);
    out[idx] = d;
  }
  return out;
}

}  // namespace nrmab
