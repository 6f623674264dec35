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

#include "nrmab/evaluation.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <sstream>

namespace nrmab {

namespace {

constexpr std::uint64_t kRoleEnv = 0x656e76;
constexpr std::uint64_t kRolePolicy = 0x706f6c;

std::string fmt(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, p - buf);
}

EpisodeLog run_episode(const Instance& inst, Policy& policy,
                       std::uint64_t seed, int run, int horizon,
                       bool timed) {
  EpisodeLog log;
  log.policy = policy.name();
  log.seed = seed;
  log.run = run;
  Rng env_rng = make_rng(seed, {kRoleEnv, static_cast<std::uint64_t>(run)});
  Rng pol_rng = make_rng(seed, {kRolePolicy, static_cast<std::uint64_t>(run)});
  Bitset s(inst.n);  // all-inactive start
  double disc = 1.0;
  for (int t = 0; t < horizon; ++t) {
    double ms = 0.0;
    ActionList a;
    if (timed) {
      const auto t0 = std::chrono::steady_clock::now();
      a = policy.select(s, pol_rng);
      const auto t1 = std::chrono::steady_clock::now();
      ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    } else {
      a = policy.select(s, pol_rng);
    }
    const StepSample out = sample_step(inst, s, a, env_rng);
    s = out.next;
    const double r = state_reward(inst, s);
    log.active_counts.push_back(s.count());
    log.rewards.push_back(r);
    log.actions.push_back(std::move(a));
    log.decision_ms.push_back(ms);
    log.discounted_return += disc * r;
    disc *= inst.gamma;
  }
  return log;
}

}  // namespace

std::vector<PolicySummary> summarize(const std::vector<EpisodeLog>& episodes,
                                     int n, int horizon) {
  std::vector<PolicySummary> out;
  std::vector<std::string> order;
  std::map<std::string, std::vector<const EpisodeLog*>> by_policy;
  for (const auto& e : episodes) {
    if (!by_policy.count(e.policy)) order.push_back(e.policy);
    by_policy[e.policy].push_back(&e);
  }
  for (const auto& name : order) {
    const auto& eps = by_policy[name];
    PolicySummary s;
    s.policy = name;
    s.episodes = static_cast<int>(eps.size());
    s.mean_activation.assign(horizon, 0.0);
    s.sd_activation.assign(horizon, 0.0);
    double ret = 0.0, rew = 0.0, ms = 0.0;
    long decisions = 0;
    for (const auto* e : eps) {
      ret += e->discounted_return;
      for (int t = 0; t < horizon; ++t) {
        s.mean_activation[t] +=
            static_cast<double>(e->active_counts[t]) / n;
        rew += e->rewards[t];
        ms += e->decision_ms[t];
        ++decisions;
      }
    }
    const double m = static_cast<double>(eps.size());
    for (int t = 0; t < horizon; ++t) s.mean_activation[t] /= m;
    for (const auto* e : eps)
      for (int t = 0; t < horizon; ++t) {
        const double d = static_cast<double>(e->active_counts[t]) / n -
                         s.mean_activation[t];
        s.sd_activation[t] += d * d;
      }
    for (int t = 0; t < horizon; ++t)
      s.sd_activation[t] = std::sqrt(s.sd_activation[t] / m);
    s.mean_cumulative_reward = ret / m;
    s.mean_reward_per_timestep = rew / static_cast<double>(decisions);
    s.mean_decision_ms = ms / static_cast<double>(decisions);
    out.push_back(std::move(s));
  }
  return out;
}

ExperimentResult run_experiment(const Instance& inst,
                                const ExperimentConfig& cfg) {
  if (cfg.horizon < 1) throw std::invalid_argument("horizon must be >= 1");
  if (cfg.runs_per_seed < 1)
    throw std::invalid_argument("runs_per_seed must be >= 1");
  if (cfg.seeds.empty()) throw std::invalid_argument("seeds must be non-empty");
  for (const auto& p : cfg.policies) {
    const auto& names = known_policy_names();
    if (std::find(names.begin(), names.end(), p) == names.end()) {
      std::string msg = "unknown policy '" + p + "'; valid names:";
      for (const auto& n : names) msg += " " + n;
      throw std::invalid_argument(msg);
    }
  }
  inst.adjacency();  // warm the lazy cache before parallel sections

  ExperimentResult res;
  for (const auto& policy_name : cfg.policies) {
    // one policy instance per seed (learned policies train per seed)
    std::vector<std::unique_ptr<Policy>> per_seed;
    try {
      for (std::uint64_t seed : cfg.seeds)
        per_seed.push_back(make_policy(policy_name, inst, cfg.params, seed));
    } catch (const std::exception& ex) {
      res.policy_errors[policy_name] = ex.what();
      continue;
    }
    res.policy_metadata[policy_name] = per_seed.front()->metadata();
    const int runs = cfg.runs_per_seed;
    const int total = static_cast<int>(cfg.seeds.size()) * runs;
    std::vector<EpisodeLog> logs(total);
#pragma omp parallel for schedule(dynamic, 1)
    for (int i = 0; i < total; ++i) {
      const int si = i / runs;
      const int run = i % runs;
      logs[i] = run_episode(inst, *per_seed[si], cfg.seeds[si], run,
                            cfg.horizon, cfg.measure_decision_time);
    }
    for (auto& l : logs) res.episodes.push_back(std::move(l));
  }
  res.summary = summarize(res.episodes, inst.n, cfg.horizon);
  return res;
}

std::string episodes_csv(const std::vector<EpisodeLog>& episodes) {
  std::ostringstream out;
  out << "policy,seed,run,timestep,active_count,reward,decision_ms\n";
  for (const auto& e : episodes) {
    for (std::size_t t = 0; t < e.active_counts.size(); ++t) {
      out << e.policy << ',' << e.seed << ',' << e.run << ',' << (t + 1)
          << ',' << e.active_counts[t] << ',' << fmt(e.rewards[t]) << ','
          << fmt(e.decision_ms[t]) << '\n';
    }
  }
  return out.str();
}

nlohmann::json summary_json(const ExperimentResult& result,
                            const ExperimentConfig& cfg) {
  nlohmann::json doc;
  doc["horizon"] = cfg.horizon;
  doc["runs_per_seed"] = cfg.runs_per_seed;
  doc["seeds"] = cfg.seeds;
  nlohmann::json policies = nlohmann::json::object();
  for (const auto& s : result.summary) {
    nlohmann::json p;
    p["episodes"] = s.episodes;
    p["mean_activation"] = s.mean_activation;
    p["sd_activation"] = s.sd_activation;
    p["mean_cumulative_reward"] = s.mean_cumulative_reward;
    p["mean_reward_per_timestep"] = s.mean_reward_per_timestep;
    p["mean_decision_ms"] = s.mean_decision_ms;
    auto meta = result.policy_metadata.find(s.policy);
    if (meta != result.policy_metadata.end() && !meta->second.empty())
      p["metadata"] = meta->second;
    policies[s.policy] = std::move(p);
  }
  doc["policies"] = std::move(policies);
  if (!result.policy_errors.empty()) {
    nlohmann::json errs = nlohmann::json::object();
    for (const auto& [name, err] : result.policy_errors) errs[name] = err;
    doc["policy_errors"] = std::move(errs);
  }
  return doc;
}

// ---------------------------------------------------------------------------
// Runtime scaling
// ---------------------------------------------------------------------------
namespace {

Instance scaling_instance(int n, int k, double avg_degree, double w,
                          std::uint64_t seed) {
  GenSpec spec;
  spec.n = n;
  spec.er_p = std::min(1.0, avg_degree / std::max(1, n - 1));
  spec.cascade_w = w;
  spec.budget_k = std::min(k, n);
  spec.gamma = 0.95;
  spec.p01_passive_lo = 0.05;
  spec.p01_passive_hi = 0.15;
  spec.p01_active_lo = 0.6;
  spec.p01_active_hi = 0.9;
  spec.p11_passive_lo = 0.6;
  spec.p11_passive_hi = 0.75;
  spec.p11_active_lo = 0.85;
  spec.p11_active_hi = 0.99;
  return generate_synthetic(spec, seed);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

}  // namespace

std::vector<ScalingRow> runtime_scaling(const ScalingConfig& cfg) {
  std::vector<ScalingRow> rows;

  for (int n : cfg.hill_climb_sizes) {
    const int k = std::min(cfg.hill_climb_k, n);
    Instance inst = scaling_instance(n, k, cfg.avg_degree, cfg.cascade_w,
                                     cfg.seed + n);
    OneStepRewardEvaluator eval(inst, OneStepRewardEvaluator::Mode::sampled,
                                cfg.lookahead_samples);
    // representative mid-activation state
    Rng srng = make_rng(cfg.seed, {0x7363, static_cast<std::uint64_t>(n)});
    Bitset s(n);
    for (int v = 0; v < n; ++v)
      if (chance(srng, 0.3)) s.set(v);
    double best = 0.0;
    long evals = 0;
    for (int trial = 0; trial < cfg.trials; ++trial) {
      Rng rng = make_rng(cfg.seed, {0x7472, static_cast<std::uint64_t>(n),
                                    static_cast<std::uint64_t>(trial)});
      const auto t0 = std::chrono::steady_clock::now();
      auto session = eval.begin(s, rng);
      const auto res = hill_climb_select(n, k, *session);
      const double secs = seconds_since(t0);
      evals = std::max(evals, res.evaluations);
      if (trial == 0 || secs < best) best = secs;
    }
    rows.push_back({"hill_climb_decision", n, k, "seconds_per_decision", best});
    rows.push_back({"hill_climb_decision", n, k, "q_evaluations",
                    static_cast<double>(evals)});
  }

  for (int n : cfg.tabular_sizes) {
    const int k = std::min(cfg.tabular_k, n);
    Instance inst = scaling_instance(n, k, cfg.avg_degree, cfg.cascade_w,
                                     cfg.seed + 1000 + n);
    QTable table;
    try {
      table = make_qtable(inst, 0.0);
    } catch (const std::exception&) {
      rows.push_back({"tabular_sweep", n, k, "skipped", 0.0});
      continue;
    }
    const std::uint64_t states = std::uint64_t{1} << n;
    const double pairs =
        static_cast<double>(states) * table.action_masks.size();
    double best = 0.0;
    for (int trial = 0; trial < cfg.trials; ++trial) {
      Rng rng = make_rng(cfg.seed, {0x7362, static_cast<std::uint64_t>(n),
                                    static_cast<std::uint64_t>(trial)});
      const auto t0 = std::chrono::steady_clock::now();
      // one full Q-learning pass: every pair updated from a sampled step
      for (std::uint64_t s = 0; s < states; ++s) {
        const Bitset sb = Bitset::from_encoded(s, n);
        const double r = state_reward(inst, sb);
        for (std::size_t ai = 0; ai < table.action_masks.size(); ++ai) {
          const ActionList a = action_from_mask(table.action_masks[ai], n);
          const StepSample out = sample_step(inst, sb, a, rng);
          const double target =
              r + inst.gamma * qtable_max_tabular(table, out.next.encoded());
          const std::size_t cell = s * table.action_masks.size() + ai;
          table.values[cell] += 0.1 * (target - table.values[cell]);
        }
      }
      const double secs = seconds_since(t0);
      if (trial == 0 || secs < best) best = secs;
    }
    rows.push_back({"tabular_sweep", n, k, "seconds_per_sweep", best});
    rows.push_back({"tabular_sweep", n, k, "pairs", pairs});
  }
  return rows;
}

std::string scaling_csv(const std::vector<ScalingRow>& rows) {
  std::ostringstream out;
  out << "method,n,k,measure,value\n";
  char buf[64];
  for (const auto& r : rows) {
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), r.value);
    out << r.method << ',' << r.n << ',' << r.k << ',' << r.measure << ','
        << std::string_view(buf, p - buf) << '\n';
  }
  return out.str();
}

}  // namespace nrmab
