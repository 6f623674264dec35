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

#include "nrmab/learning.hpp"

#include <charconv>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "nrmab/planning.hpp"

namespace nrmab {

namespace {
constexpr std::uint64_t kRoleTrain = 0x7472;  // rng stream role tag
constexpr std::size_t kMaxTableEntries = std::size_t{1} << 25;
}  // namespace

QTable make_qtable(const Instance& inst, double q_init) {
  if (inst.n > 20)
    throw std::invalid_argument(
        "tabular learning needs n <= 20; use a rollout policy instead");
  QTable q;
  q.n = inst.n;
  q.k = inst.budget_k;
  q.action_masks = feasible_action_masks(inst.n, inst.budget_k);
  const std::size_t states = std::size_t{1} << inst.n;
  if (states * q.action_masks.size() > kMaxTableEntries)
    throw std::invalid_argument(
        "tabular learner memory cap exceeded; use a rollout policy instead");
  q.action_index_of_mask.assign(states, -1);
  for (std::size_t i = 0; i < q.action_masks.size(); ++i)
    q.action_index_of_mask[q.action_masks[i]] = static_cast<int>(i);
  q.values.assign(states * q.action_masks.size(), q_init);
  q.visits.assign(states * q.action_masks.size(), 0);
  return q;
}

std::uint64_t qtable_greedy_tabular(const QTable& q, std::uint64_t s) {
  double best = -std::numeric_limits<double>::infinity();
  std::uint64_t best_mask = 0;
  for (std::size_t i = 0; i < q.action_masks.size(); ++i) {
    const double val = q.value(s, static_cast<int>(i));
    if (val > best) {
      best = val;
      best_mask = q.action_masks[i];
    }
  }
  return best_mask;
}

double qtable_max_tabular(const QTable& q, std::uint64_t s) {
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < q.action_masks.size(); ++i)
    best = std::max(best, q.value(s, static_cast<int>(i)));
  return best;
}

namespace {

struct HcPick {
  std::uint64_t mask = 0;
  double value = 0.0;
};

HcPick qtable_hc_pick(const QTable& q, std::uint64_t s) {
  HcPick res;
  res.value = q.value(s, q.action_index(0));
  for (int pass = 0; pass < q.k; ++pass) {
    double best = -std::numeric_limits<double>::infinity();
    int best_v = -1;
    for (int v = 0; v < q.n; ++v) {
      const std::uint64_t bit = std::uint64_t{1} << v;
      if (res.mask & bit) continue;
      const double val = q.value(s, q.action_index(res.mask | bit));
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

}  // namespace

std::uint64_t qtable_greedy_hc(const QTable& q, std::uint64_t s) {
  return qtable_hc_pick(q, s).mask;
}

double qtable_max_hc(const QTable& q, std::uint64_t s) {
  return qtable_hc_pick(q, s).value;
}

namespace {

// Uniform draw over all feasible sets: size by binomial weight, then a
// uniform subset of that size.
std::uint64_t random_feasible_mask(int n, int k, Rng& rng) {
  std::vector<double> cum(k + 1, 0.0);
  double total = 0.0;
  double c = 1.0;  // C(n, j)
  for (int j = 0; j <= k; ++j) {
    total += c;
    cum[j] = total;
    c = c * (n - j) / (j + 1);
  }
  const double u = uniform01(rng) * total;
  int size = 0;
  while (size < k && u > cum[size]) ++size;
  std::uint64_t mask = 0;
  std::vector<int> pool(n);
  for (int i = 0; i < n; ++i) pool[i] = i;
  for (int j = 0; j < size; ++j) {
    const int pick = j + static_cast<int>(rand_below(rng, n - j));
    std::swap(pool[j], pool[pick]);
    mask |= std::uint64_t{1} << pool[j];
  }
  return mask;
}

LearningResult q_learn_impl(const Instance& inst, const LearningConfig& cfg,
                            bool hill_climbing) {
  validate_instance(inst);
  inst.adjacency();
  LearningResult res;
  res.table = make_qtable(inst, cfg.q_init);
  QTable& q = res.table;
  const int n = inst.n;
  const long total_steps =
      static_cast<long>(cfg.episodes) * cfg.steps_per_episode;
  long global_step = 0;
  for (int ep = 0; ep < cfg.episodes; ++ep) {
    Rng rng = make_rng(cfg.seed, {kRoleTrain, static_cast<std::uint64_t>(ep)});
    Bitset s(n);
    if (cfg.random_start)
      for (int v = 0; v < n; ++v)
        if (chance(rng, 0.5)) s.set(v);
    double ret = 0.0;
    double disc = 1.0;
    double activation_sum = 0.0;
    for (int step = 0; step < cfg.steps_per_episode; ++step) {
      const double frac =
          total_steps > 1
              ? static_cast<double>(global_step) / (total_steps - 1)
              : 0.0;
      const double eps =
          cfg.epsilon_start + (cfg.epsilon_end - cfg.epsilon_start) * frac;
      const std::uint64_t s_enc = s.encoded();
      std::uint64_t a_mask;
      if (chance(rng, eps)) {
        a_mask = random_feasible_mask(n, inst.budget_k, rng);
      } else {
        a_mask = hill_climbing ? qtable_greedy_hc(q, s_enc)
                               : qtable_greedy_tabular(q, s_enc);
      }
      const double r = state_reward(inst, s);
      const ActionList action = action_from_mask(a_mask, n);
      const StepSample out = sample_step(inst, s, action, rng);
      const std::uint64_t next_enc = out.next.encoded();
      const double target_max = hill_climbing
                                    ? qtable_max_hc(q, next_enc)
                                    : qtable_max_tabular(q, next_enc);
      const int ai = q.action_index(a_mask);
      const std::size_t cell = s_enc * q.action_masks.size() + ai;
      ++q.visits[cell];
      const double alpha = cfg.alpha_inverse_visits
                               ? 1.0 / q.visits[cell]
                               : cfg.alpha;
      q.values[cell] +=
          alpha * (r + inst.gamma * target_max - q.values[cell]);
      ret += disc * r;
      disc *= inst.gamma;
      activation_sum += static_cast<double>(out.next.count()) / n;
      s = out.next;
      ++global_step;
    }
    res.curve.push_back(
        {ep, ret, activation_sum / cfg.steps_per_episode});
  }
  return res;
}

}  // namespace

LearningResult q_learn_tabular(const Instance& inst,
                               const LearningConfig& cfg) {
  return q_learn_impl(inst, cfg, false);
}

LearningResult q_learn_hc(const Instance& inst, const LearningConfig& cfg) {
  return q_learn_impl(inst, cfg, true);
}

void save_qtable(const QTable& q, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot write qtable: " + path);
  out << "# n=" << q.n << " k=" << q.k << "\n";
  out << "state action value visits\n";
  char buf[64];
  const std::size_t states = std::size_t{1} << q.n;
  for (std::size_t s = 0; s < states; ++s) {
    for (std::size_t i = 0; i < q.action_masks.size(); ++i) {
      const double val = q.value(s, static_cast<int>(i));
      auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), val);
      out << s << ' ' << q.action_masks[i] << ' '
          << std::string_view(buf, p - buf) << ' '
          << q.visits[s * q.action_masks.size() + i] << '\n';
    }
  }
}

QTable load_qtable(const Instance& inst, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open qtable: " + path);
  QTable q = make_qtable(inst, 0.0);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || line[0] == 's') continue;
    std::istringstream ls(line);
    std::uint64_t s, mask;
    std::string val;
    std::uint32_t visits;
    if (!(ls >> s >> mask >> val >> visits)) continue;
    double d = 0.0;
    std::from_chars(val.data(), val.data() + val.size(), d);
    const int ai = q.action_index(mask);
    if (ai < 0) throw std::invalid_argument("qtable row with infeasible action");
    q.values[s * q.action_masks.size() + ai] = d;
    q.visits[s * q.action_masks.size() + ai] = visits;
  }
  return q;
}

}  // namespace nrmab
