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

#include "nrmab/baselines.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace nrmab {

namespace {
constexpr std::uint64_t kRolePolicyTrain = 0x7174;
}

// ---------------------------------------------------------------------------
// Whittle index
// ---------------------------------------------------------------------------
std::array<double, 2> solve_subsidized_arm(const ArmDynamics& d, double r,
                                           double gamma, double lambda) {
  // Evaluate all four stationary policies exactly; the optimal value is
  // their pointwise maximum.
  std::array<double, 2> best{-1e300, -1e300};
  for (int a0 = 0; a0 < 2; ++a0) {
    for (int a1 = 0; a1 < 2; ++a1) {
      const double p0 = d.activation_prob(false, a0 == 1);
      const double p1 = d.activation_prob(true, a1 == 1);
      const double r0 = (a0 == 0 ? lambda : 0.0);
      const double r1 = r + (a1 == 0 ? lambda : 0.0);
      // V0 = r0 + g((1-p0)V0 + p0 V1); V1 = r1 + g((1-p1)V0 + p1 V1)
      const double a11 = 1.0 - gamma * (1.0 - p0);
      const double a12 = -gamma * p0;
      const double a21 = -gamma * (1.0 - p1);
      const double a22 = 1.0 - gamma * p1;
      const double det = a11 * a22 - a12 * a21;
      const double v0 = (r0 * a22 - a12 * r1) / det;
      const double v1 = (a11 * r1 - r0 * a21) / det;
      best[0] = std::max(best[0], v0);
      best[1] = std::max(best[1], v1);
    }
  }
  return best;
}

namespace {

// Active-minus-passive preference at arm-state sigma under subsidy lambda.
double arm_preference(const ArmDynamics& d, double r, double gamma,
                      double lambda, int sigma) {
  const auto v = solve_subsidized_arm(d, r, gamma, lambda);
  const double pa = d.activation_prob(sigma == 1, true);
  const double pp = d.activation_prob(sigma == 1, false);
  const double qa = gamma * (pa * v[1] + (1.0 - pa) * v[0]);
  const double qp = lambda + gamma * (pp * v[1] + (1.0 - pp) * v[0]);
  return qa - qp;
}

}  // namespace

WhittleIndices compute_whittle_indices(const Instance& inst) {
  WhittleIndices out;
  out.index.resize(inst.n);
  std::vector<std::string> warnings(inst.n);
#pragma omp parallel for schedule(static)
  for (int v = 0; v < inst.n; ++v) {
    const ArmDynamics& d = inst.dynamics[v];
    const double r = inst.rewards[v];
    const double bound = (r + 1.0) / (1.0 - inst.gamma) + 1.0;
    for (int sigma = 0; sigma < 2; ++sigma) {
      const double f0 = arm_preference(d, r, inst.gamma, 0.0, sigma);
      if (f0 == 0.0) {
        out.index[v][sigma] = 0.0;
        continue;
      }
      double lo = -bound, hi = bound;
      const double flo = arm_preference(d, r, inst.gamma, lo, sigma);
      const double fhi = arm_preference(d, r, inst.gamma, hi, sigma);
      if (flo < -1e-9 || fhi > 1e-9)
        throw std::runtime_error(
            "whittle bisection bracket failed for arm " + std::to_string(v));
      double prev = flo;
      bool monotone = true;
      for (int g = 1; g <= 8; ++g) {
        const double f =
            arm_preference(d, r, inst.gamma, lo + (hi - lo) * g / 8.0, sigma);
        if (f > prev + 1e-9) monotone = false;
        prev = f;
      }
      if (!monotone)
        warnings[v] = "non-monotone subsidy preference at arm " +
                      std::to_string(v);
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (arm_preference(d, r, inst.gamma, mid, sigma) >= 0.0)
          lo = mid;
        else
          hi = mid;
      }
      const double lam = 0.5 * (lo + hi);
      if (!std::isfinite(lam))
        throw std::runtime_error("whittle bisection failed for arm " +
                                 std::to_string(v));
      out.index[v][sigma] = lam;
    }
  }
  for (auto& w : warnings)
    if (!w.empty()) out.warnings.push_back(std::move(w));
  return out;
}

namespace {

class WhittlePolicy final : public Policy {
 public:
  WhittlePolicy(const Instance& inst)
      : Policy("whittle"), inst_(&inst),
        indices_(compute_whittle_indices(inst)) {}

  ActionList select(const Bitset& s, Rng&) override {
    const int n = inst_->n;
    std::vector<NodeId> order(n);
    for (int v = 0; v < n; ++v) order[v] = v;
    std::sort(order.begin(), order.end(), [&](NodeId a, NodeId b) {
      const double ia = indices_.index[a][s.get(a) ? 1 : 0];
      const double ib = indices_.index[b][s.get(b) ? 1 : 0];
      if (ia != ib) return ia > ib;
      if (inst_->rewards[a] != inst_->rewards[b])
        return inst_->rewards[a] > inst_->rewards[b];
      return a < b;
    });
    const int k = std::min(inst_->budget_k, n);
    ActionList a(order.begin(), order.begin() + k);
    std::sort(a.begin(), a.end());
    return a;
  }

  nlohmann::json metadata() const override {
    nlohmann::json m;
    nlohmann::json idx = nlohmann::json::array();
    for (const auto& pair : indices_.index)
      idx.push_back({pair[0], pair[1]});
    m["whittle_indices"] = idx;
    if (!indices_.warnings.empty()) m["warnings"] = indices_.warnings;
    return m;
  }

 private:
  const Instance* inst_;
  WhittleIndices indices_;
};

class HillClimbPolicy final : public Policy {
 public:
  HillClimbPolicy(const Instance& inst, std::shared_ptr<QEvaluator> q,
                  std::string name)
      : Policy(std::move(name)), inst_(&inst), q_(std::move(q)) {}

  ActionList select(const Bitset& s, Rng& rng) override {
    auto session = q_->begin(s, rng);
    return hill_climb_select(inst_->n, inst_->budget_k, *session).action;
  }

 private:
  const Instance* inst_;
  std::shared_ptr<QEvaluator> q_;
};

class TopKPolicy final : public Policy {
 public:
  TopKPolicy(const Instance& inst, std::shared_ptr<QEvaluator> q,
             std::string name)
      : Policy(std::move(name)), inst_(&inst), q_(std::move(q)) {}

  ActionList select(const Bitset& s, Rng& rng) override {
    auto session = q_->begin(s, rng);
    const int n = inst_->n;
    std::vector<std::pair<double, NodeId>> scored;
    scored.reserve(n);
    for (NodeId v = 0; v < n; ++v)
      scored.emplace_back(session->value_with(v), v);
    std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first > b.first;
      return a.second < b.second;
    });
    const int k = std::min(inst_->budget_k, n);
    ActionList out;
    for (int i = 0; i < k; ++i) out.push_back(scored[i].second);
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  const Instance* inst_;
  std::shared_ptr<QEvaluator> q_;
};

class RandomPolicy final : public Policy {
 public:
  explicit RandomPolicy(const Instance& inst)
      : Policy("random"), inst_(&inst) {}
  ActionList select(const Bitset&, Rng& rng) override {
    const int n = inst_->n;
    const int k = std::min(inst_->budget_k, n);
    std::vector<int> pool(n);
    for (int i = 0; i < n; ++i) pool[i] = i;
    ActionList out;
    for (int j = 0; j < k; ++j) {
      const int pick = j + static_cast<int>(rand_below(rng, n - j));
      std::swap(pool[j], pool[pick]);
      out.push_back(pool[j]);
    }
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  const Instance* inst_;
};

class NonePolicy final : public Policy {
 public:
  explicit NonePolicy(const Instance&) : Policy("none") {}
  ActionList select(const Bitset&, Rng&) override { return {}; }
};

class QTablePolicy final : public Policy {
 public:
  QTablePolicy(const Instance& inst, QTable table, bool hill_climbing,
               std::string name)
      : Policy(std::move(name)), table_(std::move(table)),
        hill_climbing_(hill_climbing) {
    (void)inst;
  }
  ActionList select(const Bitset& s, Rng&) override {
    const std::uint64_t mask = hill_climbing_
                                   ? qtable_greedy_hc(table_, s.encoded())
                                   : qtable_greedy_tabular(table_, s.encoded());
    return action_from_mask(mask, table_.n);
  }

 private:
  QTable table_;
  bool hill_climbing_;
};

bool exact_kernel_feasible(const Instance& inst) {
  if (inst.n > ExactKernel::kMaxNodes) return false;
  if (static_cast<int>(inst.edges.size()) > ExactKernel::kMaxEdges)
    return false;
  const std::uint64_t work = std::uint64_t{1}
                             << (inst.n + inst.edges.size());
  return work <= ExactKernel::kMaxPrecomputeWork;
}

}  // namespace

std::unique_ptr<Policy> whittle_policy(const Instance& inst) {
  return std::make_unique<WhittlePolicy>(inst);
}

std::unique_ptr<Policy> one_step_lookahead_policy(const Instance& inst,
                                                  int samples) {
  const auto mode = exact_kernel_feasible(inst)
                        ? OneStepRewardEvaluator::Mode::exact
                        : OneStepRewardEvaluator::Mode::sampled;
  auto eval = std::make_shared<OneStepRewardEvaluator>(inst, mode, samples);
  return std::make_unique<HillClimbPolicy>(inst, std::move(eval),
                                           "lookahead1");
}

std::unique_ptr<Policy> topk_singleton_policy(
    const Instance& inst, std::shared_ptr<QEvaluator> qsource,
    const std::string& name) {
  return std::make_unique<TopKPolicy>(inst, std::move(qsource), name);
}

std::unique_ptr<Policy> hill_climb_policy(const Instance& inst,
                                          std::shared_ptr<QEvaluator> qsource,
                                          const std::string& name) {
  return std::make_unique<HillClimbPolicy>(inst, std::move(qsource), name);
}

std::unique_ptr<Policy> random_policy(const Instance& inst) {
  return std::make_unique<RandomPolicy>(inst);
}

std::unique_ptr<Policy> none_policy(const Instance& inst) {
  return std::make_unique<NonePolicy>(inst);
}

std::unique_ptr<Policy> qtable_policy(const Instance& inst, QTable table,
                                      bool hill_climbing,
                                      const std::string& name) {
  return std::make_unique<QTablePolicy>(inst, std::move(table), hill_climbing,
                                        name);
}

const std::vector<std::string>& known_policy_names() {
  static const std::vector<std::string> names = {
      "hc-rollout", "hc-qlearn", "tabular-qlearn", "whittle",
      "lookahead1", "topk",      "random",         "none"};
  return names;
}

std::unique_ptr<Policy> make_policy(const std::string& policy_name,
                                    const Instance& inst,
                                    const PolicyParams& params,
                                    std::uint64_t master_seed) {
  if (policy_name == "none") return none_policy(inst);
  if (policy_name == "random") return random_policy(inst);
  if (policy_name == "whittle") return whittle_policy(inst);
  if (policy_name == "lookahead1")
    return one_step_lookahead_policy(inst, params.lookahead_samples);
  if (policy_name == "topk") {
    const auto mode = exact_kernel_feasible(inst)
                          ? OneStepRewardEvaluator::Mode::exact
                          : OneStepRewardEvaluator::Mode::sampled;
    auto eval = std::make_shared<OneStepRewardEvaluator>(
        inst, mode, params.lookahead_samples);
    return topk_singleton_policy(inst, std::move(eval));
  }
  if (policy_name == "hc-rollout") {
    PolicyFn base = [](const Bitset&, Rng&) { return ActionList{}; };
    auto eval = std::make_shared<RolloutQEvaluator>(
        inst, std::move(base), params.rollout_horizon, params.rollouts);
    return std::make_unique<HillClimbPolicy>(inst, std::move(eval),
                                             "hc-rollout");
  }
  if (policy_name == "hc-qlearn" || policy_name == "tabular-qlearn") {
    const bool hc = policy_name == "hc-qlearn";
    LearningConfig cfg = params.train;
    cfg.seed = derive_seed(master_seed, {kRolePolicyTrain});
    LearningResult trained =
        hc ? q_learn_hc(inst, cfg) : q_learn_tabular(inst, cfg);
    return qtable_policy(inst, std::move(trained.table), hc, policy_name);
  }
  std::string msg = "unknown policy '" + policy_name + "'; valid names:";
  for (const auto& n : known_policy_names()) msg += " " + n;
  throw std::invalid_argument(msg);
}

}  // namespace nrmab
