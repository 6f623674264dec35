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

#include "nrmab/instance.hpp"

using namespace nrmab;

namespace {

nlohmann::json default_attrs() {
  return {{"reward_default", 1.0},
          {"dynamics_default",
           {{"p01_passive", 0.1},
            {"p01_active", 0.8},
            {"p11_passive", 0.7},
            {"p11_active", 0.95}}},
          {"cascade_weight_default", 0.03},
          {"budget_k", 2},
          {"gamma", 0.95}};
}

}  // namespace

TEST_CASE("edgelist dedup and self-loop semantics") {
  const auto g = ingest_edgelist("1 2\n2 1\n1 2\n3 3\n");
  CHECK(g.n == 3);
  REQUIRE(g.edges.size() == 1);
  CHECK(g.edges[0] == std::pair<NodeId, NodeId>{0, 1});
  CHECK(g.self_loops_dropped == 1);
  CHECK(g.duplicates_collapsed == 2);
}

TEST_CASE("edgelist first-appearance label order") {
  const auto g = ingest_edgelist("a b\nb c\n");
  CHECK(g.n == 3);
  CHECK(g.label_ids.at("a") == 0);
  CHECK(g.label_ids.at("b") == 1);
  CHECK(g.label_ids.at("c") == 2);
  REQUIRE(g.edges.size() == 2);
  CHECK(g.edges[0] == std::pair<NodeId, NodeId>{0, 1});
  CHECK(g.edges[1] == std::pair<NodeId, NodeId>{1, 2});
}

TEST_CASE("edgelist comments, malformed lines, empty input") {
  const auto g = ingest_edgelist("# header\n\n1 2\n");
  CHECK(g.n == 2);

  CHECK_THROWS_WITH_AS(ingest_edgelist("1 2\n1 2 3\n"),
                       doctest::Contains("line 2"), std::invalid_argument);
  CHECK_THROWS_AS(ingest_edgelist(""), std::invalid_argument);
  CHECK_THROWS_AS(ingest_edgelist("# only comments\n"), std::invalid_argument);
}

TEST_CASE("bundled village edgelist has 202 nodes and 692 edges") {
  const auto g =
      ingest_edgelist_file(std::string(NRMAB_DATA_DIR) + "/village202.edges");
  CHECK(g.n == 202);
  CHECK(g.edges.size() == 692);
}

TEST_CASE("edgelist ingestion is deterministic") {
  const std::string text = "5 7\n7 9\n9 5\n5 11\n";
  const auto g1 = ingest_edgelist(text);
  const auto g2 = ingest_edgelist(text);
  CHECK(g1.n == g2.n);
  CHECK(g1.edges == g2.edges);
  CHECK(g1.labels == g2.labels);
}

TEST_CASE("attach_attributes builds a valid instance from defaults") {
  const auto g =
      ingest_edgelist_file(std::string(NRMAB_DATA_DIR) + "/village202.edges");
  auto attrs = default_attrs();
  attrs["budget_k"] = 20;
  const Instance inst = attach_attributes(g, attrs);
  CHECK(inst.n == 202);
  CHECK(inst.edges.size() == 692);
  CHECK(inst.budget_k == 20);
  CHECK(inst.gamma == 0.95);
  for (const auto& e : inst.edges) CHECK(e.weight == 0.03);
  for (int v = 0; v < inst.n; ++v) {
    CHECK(inst.rewards[v] == 1.0);
    CHECK(inst.dynamics[v].p01_active >= inst.dynamics[v].p01_passive);
    CHECK(inst.dynamics[v].p11_active >= inst.dynamics[v].p11_passive);
  }
}

TEST_CASE("attach_attributes rejects an Assumption-1 violation, naming the node") {
  const auto g = ingest_edgelist("x y\n");
  auto attrs = default_attrs();
  attrs["dynamics"] = {{"y",
                        {{"p01_passive", 0.3},
                         {"p01_active", 0.2},
                         {"p11_passive", 0.5},
                         {"p11_active", 0.9}}}};
  CHECK_THROWS_WITH_AS(attach_attributes(g, attrs), doctest::Contains("y"),
                       std::invalid_argument);
}

TEST_CASE("attach_attributes lists missing required keys") {
  const auto g = ingest_edgelist("x y\n");
  try {
    attach_attributes(g, nlohmann::json::object());
    FAIL("expected error");
  } catch (const std::invalid_argument& ex) {
    const std::string msg = ex.what();
    CHECK(msg.find("dynamics_default") != std::string::npos);
    CHECK(msg.find("cascade_weight_default") != std::string::npos);
    CHECK(msg.find("budget_k") != std::string::npos);
    CHECK(msg.find("gamma") != std::string::npos);
  }
}

TEST_CASE("attach_attributes rejects negative rewards and per-node overrides work") {
  const auto g = ingest_edgelist("x y\n");
  auto attrs = default_attrs();
  attrs["rewards"] = {{"y", -1.0}};
  CHECK_THROWS_AS(attach_attributes(g, attrs), std::invalid_argument);

  attrs["rewards"] = {{"y", 2.5}};
  attrs["cascade_weights"] = {{"x y", 0.4}};
  const Instance inst = attach_attributes(g, attrs);
  CHECK(inst.rewards[g.label_ids.at("y")] == 2.5);
  CHECK(inst.edges[0].weight == 0.4);
}

TEST_CASE("synthetic generation is deterministic given the seed") {
  GenSpec spec;
  spec.n = 10;
  spec.er_p = 0.3;
  spec.budget_k = 3;
  const Instance a = generate_synthetic(spec, 7);
  const Instance b = generate_synthetic(spec, 7);
  CHECK(a == b);
  const Instance c = generate_synthetic(spec, 8);
  CHECK_FALSE(a == c);
}

TEST_CASE("synthetic generation honors explicit edge counts and invariants") {
  GenSpec spec;
  spec.n = 6;
  spec.edge_count = 8;
  spec.budget_k = 2;
  const Instance inst = generate_synthetic(spec, 1);
  CHECK(inst.n == 6);
  CHECK(inst.edges.size() == 8);
  CHECK_NOTHROW(validate_instance(inst));
}

TEST_CASE("synthetic generation rejects infeasible specs") {
  GenSpec spec;
  spec.n = 4;
  spec.er_p = 0.3;
  spec.budget_k = 9;
  CHECK_THROWS_AS(generate_synthetic(spec, 1), std::invalid_argument);

  GenSpec bad_range;
  bad_range.n = 4;
  bad_range.er_p = 0.3;
  bad_range.budget_k = 2;
  bad_range.p01_passive_hi = 1.5;
  CHECK_THROWS_AS(generate_synthetic(bad_range, 1), std::invalid_argument);

  GenSpec too_many;
  too_many.n = 4;
  too_many.edge_count = 20;
  too_many.budget_k = 2;
  CHECK_THROWS_AS(generate_synthetic(too_many, 1), std::invalid_argument);
}

TEST_CASE("instance serialization round-trips and is byte-deterministic") {
  GenSpec spec;
  spec.n = 8;
  spec.er_p = 0.4;
  spec.budget_k = 3;
  spec.reward_lo = 0.2;
  spec.reward_hi = 2.0;
  const Instance inst = generate_synthetic(spec, 21);
  const std::string dump1 = instance_to_string(inst);
  const std::string dump2 = instance_to_string(inst);
  CHECK(dump1 == dump2);
  const Instance back = instance_from_json(nlohmann::json::parse(dump1));
  CHECK(back == inst);
  CHECK(instance_to_string(back) == dump1);
}

TEST_CASE("validation catches bad budgets, discounts and weights") {
  Instance inst;
  inst.n = 2;
  inst.rewards = {1.0, 1.0};
  inst.dynamics.assign(2, ArmDynamics{0.1, 0.8, 0.7, 0.95});
  inst.budget_k = 1;
  inst.gamma = 0.9;
  CHECK_NOTHROW(validate_instance(inst));

  Instance bad = inst;
  bad.budget_k = 3;
  CHECK_THROWS_AS(validate_instance(bad), std::invalid_argument);
  bad = inst;
  bad.gamma = 1.0;
  CHECK_THROWS_AS(validate_instance(bad), std::invalid_argument);
  bad = inst;
  bad.edges = {{0, 1, 1.0}};
  CHECK_THROWS_AS(validate_instance(bad), std::invalid_argument);
  bad = inst;
  bad.edges = {{0, 0, 0.5}};
  CHECK_THROWS_AS(validate_instance(bad), std::invalid_argument);
}
