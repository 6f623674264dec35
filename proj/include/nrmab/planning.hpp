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
#include <string>
#include <vector>

#include "nrmab/dynamics.hpp"

namespace nrmab {

// Dense mapping encoded state -> value, length 2^n.
using ValueTable = std::vector<double>;

using PolicyFn = std::function<ActionList(const Bitset&, Rng&)>;

// Exact Q (reward plus discounted expected next value) with the cascade
// expectation of the value table cached for sweep-style use.
class ExactQ {
 public:
  ExactQ(ExactKernel& kernel, std::span<const double> values);
  double q(std::uint64_t s, std::uint64_t a_mask) const;

 private:
  ExactKernel* kernel_;
  std::vector<double> eu_;
};

double q_exact(ExactKernel& kernel, std::span<const double> values,
               std::uint64_t s, std::uint64_t a_mask);

// ---------------------------------------------------------------------------
// Q evaluation sessions. A session scopes one action-selection round at a
// fixed state; value_with(v) evaluates Q(s, A u {v}) against the currently
// committed set A. Sampled sessions draw their randomness once per session
// (shared coupled coin profiles) so marginals are evaluated under common
// random numbers.
// ---------------------------------------------------------------------------
class QSession {
 public:
  virtual ~QSession() = default;
  virtual double value_current() = 0;
  virtual double value_with(NodeId v) = 0;
  virtual void commit(NodeId v) = 0;
};

class QEvaluator {
 public:
  virtual ~QEvaluator() = default;
  virtual std::unique_ptr<QSession> begin(const Bitset& s, Rng& rng) = 0;
};

// Exact Eq.-4 Q against a value table (enumeration scale only).
class ExactQEvaluator : public QEvaluator {
 public:
  ExactQEvaluator(ExactKernel& kernel, ValueTable values);
  std::unique_ptr<QSession> begin(const Bitset& s, Rng& rng) override;

 private:
  ExactKernel* kernel_;
  ValueTable values_;
  std::unique_ptr<ExactQ> q_;
};

// Sampled Eq.-4 Q: R(s) + gamma * mean V(apply_profile(s, A, p)) over m
// shared profiles. Needs the encoded-state value table, so n <= 64.
class SampledVEvaluator : public QEvaluator {
 public:
  SampledVEvaluator(const Instance& inst, ValueTable values, int samples);
  std::unique_ptr<QSession> begin(const Bitset& s, Rng& rng) override;

 private:
  const Instance* inst_;
  ValueTable values_;
  int samples_;
};

// Myopic one-step objective E[R(s') | s, A]: exact below the enumeration cap
// or estimated on m shared profiles. The sampled path keeps per-profile
// cascade closures and scores candidates by incremental reachability;
// Impl::naive recomputes every closure from scratch and is kept as the
// reference for tests and benchmarks.
class OneStepRewardEvaluator : public QEvaluator {
 public:
  enum class Mode { exact, sampled };
  enum class Impl { incremental, naive };

  OneStepRewardEvaluator(const Instance& inst, Mode mode, int samples,
                         Impl impl = Impl::incremental);
  std::unique_ptr<QSession> begin(const Bitset& s, Rng& rng) override;

 private:
  const Instance* inst_;
  Mode mode_;
  int samples_;
  Impl impl_;
  std::unique_ptr<ExactKernel> kernel_;
  std::vector<double> next_reward_eu_;  // E[R after cascade | u]
};

// Monte-Carlo Q: one profile-coupled first step, then the base policy for
// horizon-1 steps. Continuation draws reuse one seed per rollout index so
// candidate comparisons share their noise.
class RolloutQEvaluator : public QEvaluator {
 public:
  RolloutQEvaluator(const Instance& inst, PolicyFn base_policy, int horizon,
                    int rollouts);
  std::unique_ptr<QSession> begin(const Bitset& s, Rng& rng) override;

 private:
  const Instance* inst_;
  PolicyFn base_;
  int horizon_;
  int rollouts_;
};

// ---------------------------------------------------------------------------
// Greedy hill-climbing action selection: k passes, each adding the candidate
// with the largest Q(s, A u {v}), ties to the lowest node id, stopping early
// when the best marginal gain is non-positive. Every pass evaluates all
// remaining candidates (evaluations is exactly sum_j (n-j+1) when no early
// stop occurs).
// ---------------------------------------------------------------------------
struct HillClimbResult {
  ActionList action;               // sorted ascending
  std::vector<NodeId> pick_order;  // in selection order
  std::vector<double> value_trace; // Q(s, A_j) after each pick
  double value = 0.0;              // Q(s, final A)
  long evaluations = 0;
};

HillClimbResult hill_climb_select(int n, int k, QSession& session);

// ---------------------------------------------------------------------------
// Bellman operators over encoded-state value tables.
// ---------------------------------------------------------------------------
enum class BellmanOperator { hill_climb, optimal };

struct SweepOptions {
  bool parallel = true;  // serial sweep kept as the reference implementation
};

ValueTable bellman_hc(ExactKernel& kernel, std::span<const double> values,
                      const SweepOptions& opts = {});
ValueTable bellman_opt(ExactKernel& kernel, std::span<const double> values,
                       const SweepOptions& opts = {});
ValueTable apply_bellman(ExactKernel& kernel, BellmanOperator op,
                         std::span<const double> values,
                         const SweepOptions& opts = {});

// Greedy action chosen by each operator in every state (for policy
// extraction and the operator-agreement checks).
std::vector<std::uint64_t> bellman_hc_actions(ExactKernel& kernel,
                                              std::span<const double> values);
std::vector<std::uint64_t> bellman_opt_actions(ExactKernel& kernel,
                                               std::span<const double> values);

// All feasible action masks (size <= k) in lexicographic member order; the
// tie-break order for exhaustive maximization.
std::vector<std::uint64_t> feasible_action_masks(int n, int k);

struct ValueIterationResult {
  ValueTable values;
  std::vector<double> deltas;  // sup-norm change per sweep
  bool converged = false;
  int iterations = 0;
};

ValueIterationResult value_iteration(ExactKernel& kernel, BellmanOperator op,
                                     ValueTable v0, double tol, int max_iters,
                                     const SweepOptions& opts = {});

// ---------------------------------------------------------------------------
// Multi-Bellman decomposition over meta-states (s, A, t). gamma_tilde is the
// positive real k-th root of gamma (0 when gamma is 0). Selection steps use
// the modified reward gamma_tilde^{-t} * (R(s, A u {a}) - R(s, A)); the t=k
// step applies the built set through the full kernel. Composing k selection
// steps with the final transition step reproduces the hill-climbing Bellman
// operator exactly, provided the selection follows the same greedy rule.
// ---------------------------------------------------------------------------
struct MetaState {
  std::uint64_t s = 0;
  std::uint64_t action_mask = 0;
  int t = 0;
};

double meta_discount(const Instance& inst);
double meta_reward(const Instance& inst, std::uint64_t s,
                   std::uint64_t partial_mask, NodeId v, int t);

// One application of the meta operator against a caller-supplied extended
// value (arguments: environment state, partial action mask, step counter).
using MetaValueFn =
    std::function<double(std::uint64_t, std::uint64_t, int)>;
double multi_bellman_step(ExactKernel& kernel, const MetaValueFn& extended,
                          const MetaState& meta);

// Greedy-chained composite from (s, {}, 0): base reward plus the telescoped
// discounted modified rewards plus gamma * E[V(s')]. Early-stopped chains
// pad the remaining selection steps with zero-marginal no-ops so the k-step
// discount structure is preserved.
struct MetaComposite {
  double value = 0.0;
  ActionList action;
  std::vector<double> reward_terms;  // gamma_tilde^t * meta reward per pick
};
MetaComposite multi_bellman_composite(ExactKernel& kernel,
                                      std::span<const double> values,
                                      std::uint64_t s);

// ---------------------------------------------------------------------------
// Plain Monte-Carlo Q estimate: execute the action, then follow the base
// policy; average the discounted H-step return over m rollouts.
// ---------------------------------------------------------------------------
double rollout_q(const Instance& inst, const Bitset& s,
                 std::span<const NodeId> action, const PolicyFn& base_policy,
                 int horizon, int rollouts, Rng& rng);

// Flat text artifact: one "state value" line per encoded state.
void save_value_table(std::span<const double> values, const std::string& path);
ValueTable load_value_table(const std::string& path);

}  // namespace nrmab
