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

#include "nrmab/verify.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace nrmab {

std::string verdict_name(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::finding: return "finding";
    case Verdict::skipped: return "skipped";
  }
  return "unknown";
}

void CheckReport::add_violation(const std::string& witness, double magnitude,
                                bool implementation_level) {
  ++violation_count;
  if (static_cast<int>(violations.size()) < kMaxWitnesses)
    violations.push_back({witness, magnitude});
  if (implementation_level)
    verdict = Verdict::fail;
  else if (verdict != Verdict::fail)
    verdict = Verdict::finding;
}

nlohmann::json report_to_json(const CheckReport& r) {
  nlohmann::json j;
  j["name"] = r.name;
  j["instance"] = r.instance_desc;
  j["trials"] = r.trials;
  j["violations"] = r.violation_count;
  nlohmann::json w = nlohmann::json::array();
  for (const auto& v : r.violations)
    w.push_back({{"witness", v.witness}, {"magnitude", v.magnitude}});
  j["witnesses"] = std::move(w);
  j["verdict"] = verdict_name(r.verdict);
  if (!r.details.empty()) j["details"] = r.details;
  return j;
}

std::string report_text(const CheckReport& r) {
  std::ostringstream out;
  out << (r.verdict == Verdict::pass      ? "PASS   "
          : r.verdict == Verdict::fail    ? "FAIL   "
          : r.verdict == Verdict::finding ? "FINDING"
                                          : "SKIP   ")
      << ' ' << r.name;
  if (!r.instance_desc.empty()) out << " [" << r.instance_desc << ']';
  out << " trials=" << r.trials << " violations=" << r.violation_count;
  if (!r.violations.empty())
    out << " worst=" << r.violations.front().witness << " ("
        << r.violations.front().magnitude << ")";
  if (r.verdict == Verdict::skipped && r.details.contains("reason"))
    out << " reason=" << r.details["reason"].get<std::string>();
  return out.str();
}

ValueTable modular_value_table(const Instance& inst) {
  const std::uint64_t states = std::uint64_t{1} << inst.n;
  ValueTable v(states, 0.0);
  for (std::uint64_t s = 1; s < states; ++s)
    v[s] = v[s & (s - 1)] + inst.rewards[std::countr_zero(s)];
  return v;
}

ValueTable random_value_table(const Instance& inst, Rng& rng) {
  const double cap = inst.max_reward_sum() / (1.0 - inst.gamma);
  ValueTable v(std::uint64_t{1} << inst.n);
  for (auto& x : v) x = cap * uniform01(rng);
  return v;
}

// ---------------------------------------------------------------------------
CheckReport check_kernel_normalization(const Instance& inst) {
  CheckReport r;
  r.name = "kernel_normalization";
  ExactKernel kernel(inst);
  kernel.precompute_cascades();
  const auto masks = feasible_action_masks(inst.n, inst.budget_k);
  const std::uint64_t states = kernel.num_states();
  double worst = 0.0;
  for (std::uint64_t s = 0; s < states; ++s) {
    for (std::uint64_t a : masks) {
      const auto dist = kernel.full_kernel(s, a);
      double total = 0.0;
      for (double p : dist) total += p;
      const double dev = std::abs(total - 1.0);
      worst = std::max(worst, dev);
      ++r.trials;
      if (dev > 1e-9)
        r.add_violation("s=" + std::to_string(s) + " a=" + std::to_string(a),
                        dev, true);
    }
  }
  // cascades only activate
  for (std::uint64_t u = 0; u < states; ++u) {
    for (const auto& [sp, p] : kernel.cascade_distribution(u)) {
      ++r.trials;
      if ((sp & u) != u)
        r.add_violation("cascade u=" + std::to_string(u) +
                            " s'=" + std::to_string(sp),
                        p, true);
    }
  }
  r.details["max_normalization_error"] = worst;
  return r;
}

CheckReport check_sampling_consistency(const Instance& inst,
                                       std::uint64_t seed) {
  CheckReport r;
  r.name = "sampling_consistency";
  inst.adjacency();
  Rng rng = make_rng(seed, {0x73616d});
  const int n = inst.n;
  const int k = inst.budget_k;
  for (int trial = 0; trial < 2000; ++trial) {
    Bitset s(n);
    for (int v = 0; v < n; ++v)
      if (chance(rng, 0.5)) s.set(v);
    // coupling invariant
    const CoinProfile p = sample_coin_profile(inst, s, rng);
    ++r.trials;
    if (!p.x.is_subset_of(p.y))
      r.add_violation("coupling trial=" + std::to_string(trial), 1.0, true);
    // cascade monotonicity
    ActionList a;
    for (int v = 0; v < n && static_cast<int>(a.size()) < k; ++v)
      if (chance(rng, 0.2)) a.push_back(v);
    const StepSample out = sample_step(inst, s, a, rng);
    ++r.trials;
    if (!out.u.is_subset_of(out.next))
      r.add_violation("monotone trial=" + std::to_string(trial), 1.0, true);
  }
  // fixed-seed reproducibility
  Bitset s(n);
  Rng r1 = make_rng(seed, {1});
  Rng r2 = make_rng(seed, {1});
  const StepSample o1 = sample_step(inst, s, {}, r1);
  const StepSample o2 = sample_step(inst, s, {}, r2);
  ++r.trials;
  if (!(o1.u == o2.u && o1.next == o2.next))
    r.add_violation("determinism", 1.0, true);
  return r;
}

namespace {

// All Q(s, A) for every subset A at one state.
std::vector<double> q_row(const ExactQ& q, int n, std::uint64_t s) {
  std::vector<double> out(std::uint64_t{1} << n);
  for (std::uint64_t a = 0; a < out.size(); ++a) out[a] = q.q(s, a);
  return out;
}

}  // namespace

CheckReport check_submodularity(const Instance& inst,
                                std::span<const double> values,
                                double tolerance, std::uint64_t seed) {
  CheckReport r;
  r.name = "submodularity";
  ExactKernel kernel(inst);
  const ExactQ q(kernel, values);
  const int n = inst.n;
  const std::uint64_t states = kernel.num_states();
  double worst = 0.0;

  if (n <= 6) {
    for (std::uint64_t s = 0; s < states; ++s) {
      const auto qs = q_row(q, n, s);
      for (std::uint64_t b = 0; b < qs.size(); ++b) {
        for (int t = 0; t < n; ++t) {
          const std::uint64_t tb = std::uint64_t{1} << t;
          if (b & tb) continue;
          const double gain_b = qs[b | tb] - qs[b];
          // iterate proper and improper submasks of b
          std::uint64_t a = b;
          while (true) {
            const double gain_a = qs[a | tb] - qs[a];
            ++r.trials;
            const double gap = gain_b - gain_a;
            worst = std::max(worst, gap);
            if (gap > tolerance)
              r.add_violation("s=" + std::to_string(s) +
                                  " A=" + std::to_string(a) +
                                  " B=" + std::to_string(b) +
                                  " t=" + std::to_string(t),
                              gap, false);
            if (a == 0) break;
            a = (a - 1) & b;
          }
        }
      }
    }
  } else {
    Rng rng = make_rng(seed, {0x737562});
    for (int trial = 0; trial < 2000; ++trial) {
      const std::uint64_t s = rand_below(rng, states);
      const std::uint64_t b = rand_below(rng, states);
      std::uint64_t a = 0;
      for (int v = 0; v < n; ++v)
        if (((b >> v) & 1u) && chance(rng, 0.5)) a |= std::uint64_t{1} << v;
      int t = -1;
      for (int probe = 0; probe < 4 * n; ++probe) {
        const int cand = static_cast<int>(rand_below(rng, n));
        if (!((b >> cand) & 1u)) {
          t = cand;
          break;
        }
      }
      if (t < 0) continue;
      const std::uint64_t tb = std::uint64_t{1} << t;
      const double gain_a = q.q(s, a | tb) - q.q(s, a);
      const double gain_b = q.q(s, b | tb) - q.q(s, b);
      ++r.trials;
      const double gap = gain_b - gain_a;
      worst = std::max(worst, gap);
      if (gap > tolerance)
        r.add_violation("s=" + std::to_string(s) + " A=" + std::to_string(a) +
                            " B=" + std::to_string(b) +
                            " t=" + std::to_string(t),
                        gap, false);
    }
  }
  r.details["max_marginal_gap"] = worst;

  // decomposition oracle: expected future value recomputed from the coupled
  // coin-profile simulation
  if (n <= 4 && inst.edges.size() <= 8) {
    const auto eu = kernel.cascade_expectation(values);
    std::vector<ActionList> action_of(states);
    for (std::uint64_t a = 0; a < states; ++a)
      action_of[a] = action_from_mask(a, n);
    double worst_dev = 0.0;
    for (std::uint64_t s = 0; s < states; ++s) {
      std::vector<double> sigma(states, 0.0);
      const Bitset sb = Bitset::from_encoded(s, n);
      enumerate_coin_profiles(
          inst, sb, [&](double prob, const CoinProfile& profile) {
            for (std::uint64_t a = 0; a < states; ++a) {
              const Bitset next = apply_profile(inst, sb, action_of[a], profile);
              sigma[a] += prob * values[next.encoded()];
            }
          });
      for (std::uint64_t a = 0; a < states; ++a) {
        const double kernel_term = kernel.expected_under_transition(s, a, eu);
        const double dev = std::abs(sigma[a] - kernel_term);
        worst_dev = std::max(worst_dev, dev);
        ++r.trials;
        if (dev > 1e-9)
          r.add_violation("decomposition s=" + std::to_string(s) +
                              " a=" + std::to_string(a),
                          dev, true);
      }
    }
    r.details["max_decomposition_error"] = worst_dev;
  }
  return r;
}

CheckReport check_greedy_ratio(const Instance& inst,
                               std::span<const double> values) {
  CheckReport r;
  r.name = "greedy_ratio";
  if (inst.n > 6)
    throw std::invalid_argument("greedy ratio check needs n <= 6");
  ExactKernel kernel(inst);
  const ExactQ q(kernel, values);
  const int n = inst.n;
  const int k = inst.budget_k;
  const double bound = 1.0 - 1.0 / std::exp(1.0);
  const auto feasible = feasible_action_masks(n, k);
  double min_ratio = 1.0;
  long precondition_failures = 0;
  for (std::uint64_t s = 0; s < kernel.num_states(); ++s) {
    const auto qs = q_row(q, n, s);
    // preconditions: monotone and submodular Q(s, .) at this state
    bool ok = true;
    for (std::uint64_t a = 0; a < qs.size() && ok; ++a)
      for (int t = 0; t < n; ++t) {
        const std::uint64_t tb = std::uint64_t{1} << t;
        if (a & tb) continue;
        if (qs[a | tb] < qs[a] - 1e-9) {
          ok = false;
          break;
        }
      }
    for (std::uint64_t b = 0; b < qs.size() && ok; ++b)
      for (int t = 0; t < n && ok; ++t) {
        const std::uint64_t tb = std::uint64_t{1} << t;
        if (b & tb) continue;
        std::uint64_t a = b;
        while (true) {
          if ((qs[b | tb] - qs[b]) - (qs[a | tb] - qs[a]) > 1e-9) {
            ok = false;
            break;
          }
          if (a == 0) break;
          a = (a - 1) & b;
        }
      }
    if (!ok) {
      ++precondition_failures;
      continue;
    }
    // greedy on the Q row, same rule as the hill-climbing operator
    std::uint64_t mask = 0;
    double cur = qs[0];
    for (int pass = 0; pass < k; ++pass) {
      double best = -1e300;
      int best_v = -1;
      for (int v = 0; v < n; ++v) {
        const std::uint64_t bit = std::uint64_t{1} << v;
        if (mask & bit) continue;
        if (qs[mask | bit] > best) {
          best = qs[mask | bit];
          best_v = v;
        }
      }
      if (best_v < 0 || best <= cur) break;
      mask |= std::uint64_t{1} << best_v;
      cur = best;
    }
    double opt = -1e300;
    for (std::uint64_t a : feasible) opt = std::max(opt, qs[a]);
    ++r.trials;
    if (opt <= 1e-12) continue;  // degenerate, ratio trivially fine
    const double ratio = cur / opt;
    min_ratio = std::min(min_ratio, ratio);
    if (ratio < bound - 1e-9)
      r.add_violation("s=" + std::to_string(s), bound - ratio, false);
  }
  r.details["min_ratio"] = min_ratio;
  r.details["bound"] = bound;
  r.details["precondition_failures"] = precondition_failures;
  return r;
}

CheckReport check_equivalence(const Instance& inst,
                              std::span<const double> values) {
  CheckReport r;
  r.name = "multi_bellman_equivalence";
  ExactKernel kernel(inst);
  const ValueTable bv = bellman_hc(kernel, values);
  double worst = 0.0;
  for (std::uint64_t s = 0; s < kernel.num_states(); ++s) {
    const MetaComposite comp = multi_bellman_composite(kernel, values, s);
    const double dev = std::abs(comp.value - bv[s]);
    worst = std::max(worst, dev);
    ++r.trials;
    if (dev > 1e-9)
      r.add_violation("s=" + std::to_string(s), dev, true);
  }
  r.details["max_deviation"] = worst;
  return r;
}

CheckReport check_contraction(const Instance& inst, BellmanOperator op,
                              int pairs, std::uint64_t seed) {
  CheckReport r;
  r.name = op == BellmanOperator::hill_climb ? "contraction_hc"
                                             : "contraction_opt";
  ExactKernel kernel(inst);
  kernel.precompute_cascades();
  Rng rng = make_rng(seed, {0x636f6e, static_cast<std::uint64_t>(op)});
  double max_ratio = 0.0;
  ValueTable worst_v1, worst_v2;
  for (int i = 0; i < pairs; ++i) {
    const ValueTable v1 = random_value_table(inst, rng);
    const ValueTable v2 = random_value_table(inst, rng);
    double diff = 0.0;
    for (std::size_t s = 0; s < v1.size(); ++s)
      diff = std::max(diff, std::abs(v1[s] - v2[s]));
    if (diff == 0.0) continue;  // degenerate pair
    const ValueTable b1 = apply_bellman(kernel, op, v1);
    const ValueTable b2 = apply_bellman(kernel, op, v2);
    double bdiff = 0.0;
    for (std::size_t s = 0; s < b1.size(); ++s)
      bdiff = std::max(bdiff, std::abs(b1[s] - b2[s]));
    const double ratio = bdiff / diff;
    ++r.trials;
    if (ratio > max_ratio) {
      max_ratio = ratio;
      if (ratio > inst.gamma + 1e-9) {
        worst_v1 = v1;
        worst_v2 = v2;
      }
    }
    if (ratio > inst.gamma + 1e-9)
      r.add_violation("pair=" + std::to_string(i), ratio - inst.gamma,
                      op == BellmanOperator::optimal);
  }
  r.details["max_ratio"] = max_ratio;
  r.details["gamma"] = inst.gamma;
  if (!worst_v1.empty()) {
    r.details["witness_v1"] = worst_v1;
    r.details["witness_v2"] = worst_v2;
  }
  return r;
}

CheckReport check_value_iteration_rate(const Instance& inst,
                                       BellmanOperator op) {
  CheckReport r;
  r.name = op == BellmanOperator::hill_climb ? "value_iteration_rate_hc"
                                             : "value_iteration_rate_opt";
  ExactKernel kernel(inst);
  kernel.precompute_cascades();
  const bool impl_level = op == BellmanOperator::optimal;
  std::vector<ValueTable> iterates;
  iterates.push_back(ValueTable(kernel.num_states(), 0.0));
  std::vector<double> deltas;
  for (int it = 0; it < 2000; ++it) {
    ValueTable next = apply_bellman(kernel, op, iterates.back());
    double delta = 0.0;
    for (std::size_t s = 0; s < next.size(); ++s)
      delta = std::max(delta, std::abs(next[s] - iterates.back()[s]));
    iterates.push_back(std::move(next));
    deltas.push_back(delta);
    if (delta <= 1e-10) break;
  }
  for (std::size_t t = 0; t + 1 < deltas.size(); ++t) {
    ++r.trials;
    if (deltas[t + 1] > inst.gamma * deltas[t] + 1e-9)
      r.add_violation("delta step " + std::to_string(t),
                      deltas[t + 1] - inst.gamma * deltas[t], impl_level);
  }
  // geometric error envelope against the final iterate
  const ValueTable& fixed = iterates.back();
  if (!deltas.empty() && inst.gamma > 0.0) {
    double geom = deltas[0] / (1.0 - inst.gamma);
    for (std::size_t t = 1; t + 1 < iterates.size(); ++t) {
      geom *= inst.gamma;
      double err = 0.0;
      for (std::size_t s = 0; s < fixed.size(); ++s)
        err = std::max(err, std::abs(iterates[t][s] - fixed[s]));
      ++r.trials;
      if (err > geom + 1e-6)
        r.add_violation("envelope step " + std::to_string(t), err - geom,
                        impl_level);
    }
  }
  r.details["iterations"] = deltas.size();
  r.details["deltas"] = deltas;
  return r;
}

// ---------------------------------------------------------------------------
std::vector<NamedInstance> builtin_small_suite() {
  std::vector<NamedInstance> out;
  {
    Instance path3;
    path3.n = 3;
    path3.edges = {{0, 1, 0.5}, {1, 2, 0.5}};
    path3.rewards = {1.0, 1.0, 1.0};
    path3.dynamics.assign(3, ArmDynamics{0.1, 0.8, 0.7, 0.95});
    path3.budget_k = 2;
    path3.gamma = 0.9;
    validate_instance(path3);
    out.push_back({"tiny3-path", std::move(path3)});
  }
  {
    GenSpec s;
    s.n = 4;
    s.edge_count = 5;
    s.cascade_w = 0.3;
    s.budget_k = 2;
    s.gamma = 0.9;
    s.reward_lo = 0.5;
    s.reward_hi = 1.5;
    out.push_back({"tiny4", generate_synthetic(s, 11)});
  }
  {
    GenSpec s;
    s.n = 5;
    s.edge_count = 7;
    s.cascade_w = 0.2;
    s.budget_k = 3;
    s.gamma = 0.95;
    out.push_back({"tiny5", generate_synthetic(s, 12)});
  }
  {
    GenSpec s;
    s.n = 6;
    s.edge_count = 8;
    s.cascade_w = 0.25;
    s.budget_k = 3;
    s.gamma = 0.9;
    s.reward_lo = 0.5;
    s.reward_hi = 2.0;
    out.push_back({"tiny6", generate_synthetic(s, 13)});
  }
  return out;
}

std::vector<CheckReport> run_all_checks(const Instance& inst,
                                        const std::string& name,
                                        std::uint64_t seed) {
  std::vector<CheckReport> out;
  auto guarded = [&](const std::string& cname, auto&& fn) {
    try {
      CheckReport r = fn();
      r.instance_desc = name;
      out.push_back(std::move(r));
    } catch (const std::exception& ex) {
      CheckReport r;
      r.name = cname;
      r.instance_desc = name;
      r.verdict = Verdict::skipped;
      r.details["reason"] = ex.what();
      out.push_back(std::move(r));
    }
  };

  guarded("kernel_normalization",
          [&] { return check_kernel_normalization(inst); });
  guarded("sampling_consistency",
          [&] { return check_sampling_consistency(inst, seed); });
  guarded("submodularity", [&] {
    const ValueTable v = modular_value_table(inst);
    return check_submodularity(inst, v, 1e-9, seed);
  });
  guarded("greedy_ratio", [&] {
    const ValueTable v = modular_value_table(inst);
    return check_greedy_ratio(inst, v);
  });
  guarded("multi_bellman_equivalence", [&] {
    // modular table plus random tables, merged into one report
    CheckReport merged;
    merged.name = "multi_bellman_equivalence";
    double worst = 0.0;
    Rng rng = make_rng(seed, {0x6571});
    for (int rep = 0; rep < 6; ++rep) {
      const ValueTable v = rep == 0 ? modular_value_table(inst)
                                    : random_value_table(inst, rng);
      CheckReport r = check_equivalence(inst, v);
      merged.trials += r.trials;
      for (const auto& viol : r.violations)
        merged.add_violation("table " + std::to_string(rep) + ": " +
                                 viol.witness,
                             viol.magnitude, true);
      worst = std::max(worst, r.details["max_deviation"].get<double>());
    }
    merged.details["max_deviation"] = worst;
    return merged;
  });
  guarded("contraction_opt", [&] {
    return check_contraction(inst, BellmanOperator::optimal, 100, seed);
  });
  guarded("contraction_hc", [&] {
    return check_contraction(inst, BellmanOperator::hill_climb, 100, seed);
  });
  guarded("value_iteration_rate_opt", [&] {
    return check_value_iteration_rate(inst, BellmanOperator::optimal);
  });
  guarded("value_iteration_rate_hc", [&] {
    return check_value_iteration_rate(inst, BellmanOperator::hill_climb);
  });
  return out;
}

nlohmann::json reports_to_json(const std::vector<CheckReport>& reports) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : reports) arr.push_back(report_to_json(r));
  return arr;
}

std::string reports_text(const std::vector<CheckReport>& reports) {
  std::ostringstream out;
  for (const auto& r : reports) out << report_text(r) << '\n';
  return out.str();
}

bool any_failure(const std::vector<CheckReport>& reports) {
  for (const auto& r : reports)
    if (r.verdict == Verdict::fail) return true;
  return false;
}

}  // namespace nrmab
