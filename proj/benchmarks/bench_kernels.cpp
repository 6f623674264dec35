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

// Compares the OpenMP kernels against their serial reference
// implementations, and the incremental sampled evaluator against the
// from-scratch one.

#include <chrono>
#include <cstdio>

#include "nrmab/planning.hpp"
#include "nrmab/verify.hpp"

using namespace nrmab;

namespace {

double time_once(const std::function<void()>& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  fn();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

double time_best(int reps, const std::function<void()>& fn) {
  double best = 0.0;
  for (int i = 0; i < reps; ++i) {
    const double t = time_once(fn);
    if (i == 0 || t < best) best = t;
  }
  return best;
}

}  // namespace

int main() {
  std::printf("%-34s %12s %12s %8s\n", "kernel", "serial[s]", "parallel[s]",
              "speedup");

  {
    GenSpec gs;
    gs.n = 12;
    gs.er_p = 0.18;
    gs.cascade_w = 0.1;
    gs.budget_k = 3;
    Instance inst;
    std::uint64_t seed = 5;
    for (;;) {  // keep within the exact-kernel edge cap
      inst = generate_synthetic(gs, seed++);
      if (static_cast<int>(inst.edges.size()) <= ExactKernel::kMaxEdges) break;
    }
    ExactKernel kernel(inst);
    kernel.precompute_cascades();
    const ValueTable v = modular_value_table(inst);
    const double ts = time_best(
        3, [&] { (void)bellman_hc(kernel, v, {.parallel = false}); });
    const double tp = time_best(
        3, [&] { (void)bellman_hc(kernel, v, {.parallel = true}); });
    std::printf("%-34s %12.4f %12.4f %8.2f\n", "bellman_hc sweep (n=12)", ts,
                tp, ts / tp);
    const double os = time_best(
        3, [&] { (void)bellman_opt(kernel, v, {.parallel = false}); });
    const double op = time_best(
        3, [&] { (void)bellman_opt(kernel, v, {.parallel = true}); });
    std::printf("%-34s %12.4f %12.4f %8.2f\n", "bellman_opt sweep (n=12)", os,
                op, os / op);
  }

  std::printf("\n%-34s %12s %12s %8s\n", "evaluator", "naive[s]",
              "incremental[s]", "speedup");
  for (int n : {50, 100, 200}) {
    GenSpec gs;
    gs.n = n;
    gs.er_p = 6.0 / (n - 1);
    gs.cascade_w = 0.03;
    gs.budget_k = 10;
    const Instance inst = generate_synthetic(gs, 7);
    OneStepRewardEvaluator naive(inst, OneStepRewardEvaluator::Mode::sampled,
                                 200, OneStepRewardEvaluator::Impl::naive);
    OneStepRewardEvaluator incr(inst, OneStepRewardEvaluator::Mode::sampled,
                                200,
                                OneStepRewardEvaluator::Impl::incremental);
    Bitset s(n);
    Rng srng = make_rng(1, {});
    for (int v = 0; v < n; ++v)
      if (chance(srng, 0.3)) s.set(v);
    auto decide = [&](OneStepRewardEvaluator& eval) {
      Rng rng = make_rng(2, {});
      auto session = eval.begin(s, rng);
      (void)hill_climb_select(n, inst.budget_k, *session);
    };
    const double tn = time_best(3, [&] { decide(naive); });
    const double ti = time_best(3, [&] { decide(incr); });
    char label[64];
    std::snprintf(label, sizeof(label), "one-step decision (n=%d)", n);
    std::printf("%-34s %12.4f %12.4f %8.2f\n", label, tn, ti, tn / ti);
  }
  return 0;
}
