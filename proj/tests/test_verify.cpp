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

#include <doctest.h>

#include "helpers.hpp"
#include "nrmab/verify.hpp"

using namespace nrmab;

TEST_CASE("kernel normalization passes on the bundled instances") {
  for (const auto& [name, inst] : builtin_small_suite()) {
    const auto r = check_kernel_normalization(inst);
    INFO(name);
    CHECK(r.verdict == Verdict::pass);
    CHECK(r.violation_count == 0);
    CHECK(r.trials > 0);
  }
}

TEST_CASE("submodularity holds with a modular value table") {
  const Instance inst = builtin_small_suite()[0].inst;  // tiny3-path
  const ValueTable v = modular_value_table(inst);
  const auto r = check_submodularity(inst, v, 1e-9);
  CHECK(r.verdict == Verdict::pass);
  CHECK(r.violation_count == 0);
}

TEST_CASE("a no-edge gamma-0 instance is trivially submodular") {
  Instance inst = nrmab::testing::no_edges(4, 2);
  inst.gamma = 0.0;
  const ValueTable v = modular_value_table(inst);
  const auto r = check_submodularity(inst, v, 1e-9);
  CHECK(r.verdict == Verdict::pass);
  CHECK(r.details["max_marginal_gap"].get<double>() <= 1e-12);
}

TEST_CASE("greedy ratio check: k=1 gives ratio one") {
  Instance inst = builtin_small_suite()[1].inst;
  inst.budget_k = 1;
  const ValueTable v = modular_value_table(inst);
  const auto r = check_greedy_ratio(inst, v);
  CHECK(r.verdict == Verdict::pass);
  CHECK(r.details["min_ratio"].get<double>() ==
        doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("greedy ratio check: gamma 0 gives ratio one") {
  Instance inst = builtin_small_suite()[3].inst;
  inst.gamma = 0.0;
  const ValueTable v = modular_value_table(inst);
  const auto r = check_greedy_ratio(inst, v);
  CHECK(r.verdict == Verdict::pass);
  CHECK(r.details["min_ratio"].get<double>() ==
        doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("equivalence check passes on bundled instances") {
  const Instance inst = builtin_small_suite()[2].inst;
  Rng rng = make_rng(1, {});
  for (int rep = 0; rep < 3; ++rep) {
    const ValueTable v = rep == 0 ? modular_value_table(inst)
                                  : random_value_table(inst, rng);
    const auto r = check_equivalence(inst, v);
    CHECK(r.verdict == Verdict::pass);
  }
}

TEST_CASE("optimal operator contracts on random pairs") {
  const Instance inst = builtin_small_suite()[1].inst;
  const auto r = check_contraction(inst, BellmanOperator::optimal, 40, 7);
  CHECK(r.verdict == Verdict::pass);
  CHECK(r.details["max_ratio"].get<double>() <= inst.gamma + 1e-9);
}

TEST_CASE("hill-climbing contraction excesses become findings, not failures") {
  const Instance inst = builtin_small_suite()[1].inst;
  const auto r = check_contraction(inst, BellmanOperator::hill_climb, 40, 7);
  CHECK(r.verdict != Verdict::fail);
  if (r.violation_count > 0) {
    CHECK(r.verdict == Verdict::finding);
    CHECK(r.details.contains("witness_v1"));
  }
}

TEST_CASE("gamma 0 makes the hill-climbing operator constant") {
  Instance inst = builtin_small_suite()[1].inst;
  inst.gamma = 0.0;
  const auto r = check_contraction(inst, BellmanOperator::hill_climb, 20, 3);
  CHECK(r.verdict == Verdict::pass);
  CHECK(r.details["max_ratio"].get<double>() == 0.0);
}

TEST_CASE("value iteration rate check passes for the optimal operator") {
  const Instance inst = builtin_small_suite()[1].inst;
  const auto r = check_value_iteration_rate(inst, BellmanOperator::optimal);
  CHECK(r.verdict == Verdict::pass);
}

TEST_CASE("oversized instances skip the exact checks but keep sampled ones") {
  GenSpec s;
  s.n = 20;
  s.er_p = 0.15;
  s.budget_k = 4;
  const Instance inst = generate_synthetic(s, 44);
  const auto reports = run_all_checks(inst, "n20", 5);
  bool sampled_ran = false;
  int skipped = 0;
  for (const auto& r : reports) {
    if (r.name == "sampling_consistency") {
      sampled_ran = true;
      CHECK(r.verdict == Verdict::pass);
    }
    if (r.verdict == Verdict::skipped) ++skipped;
  }
  CHECK(sampled_ran);
  CHECK(skipped >= 5);
  CHECK_FALSE(any_failure(reports));
}

TEST_CASE("reports are deterministic given the seed") {
  const Instance inst = builtin_small_suite()[0].inst;
  const auto r1 = run_all_checks(inst, "tiny3-path", 9);
  const auto r2 = run_all_checks(inst, "tiny3-path", 9);
  CHECK(reports_to_json(r1).dump() == reports_to_json(r2).dump());
}

TEST_CASE("verdict is pass exactly when there are no violations") {
  const Instance inst = builtin_small_suite()[0].inst;
  const auto reports = run_all_checks(inst, "tiny3-path", 2);
  for (const auto& r : reports) {
    if (r.verdict == Verdict::skipped) continue;
    CHECK((r.verdict == Verdict::pass) == (r.violation_count == 0));
  }
}

TEST_CASE("report JSON carries names, verdicts and witnesses") {
  const Instance inst = builtin_small_suite()[0].inst;
  const auto r = check_kernel_normalization(inst);
  const auto j = report_to_json(r);
  CHECK(j["name"] == "kernel_normalization");
  CHECK(j["verdict"] == "pass");
  CHECK(j.contains("trials"));
  const std::string text = report_text(r);
  CHECK(text.find("kernel_normalization") != std::string::npos);
}
