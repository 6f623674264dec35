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

#include <string>
#include <vector>

#include <json.hpp>

#include "nrmab/planning.hpp"

namespace nrmab {

// A check either passes, fails (implementation-level inconsistency, e.g. a
// non-normalized kernel), records findings (a theory-level claim not
// observed on this instance, preserved with witnesses), or is skipped when
// the instance exceeds its enumeration caps.
enum class Verdict { pass, fail, finding, skipped };

std::string verdict_name(Verdict v);

struct Violation {
  std::string witness;
  double magnitude = 0.0;
};

struct CheckReport {
  std::string name;
  std::string instance_desc;
  long trials = 0;
  long violation_count = 0;
  std::vector<Violation> violations;  // at most kMaxWitnesses kept
  Verdict verdict = Verdict::pass;
  nlohmann::json details;

  static constexpr int kMaxWitnesses = 16;
  void add_violation(const std::string& witness, double magnitude,
                     bool implementation_level);
};

nlohmann::json report_to_json(const CheckReport& r);
std::string report_text(const CheckReport& r);

// Modular value table V(s) = sum r(v) s_v, the baseline submodular V.
ValueTable modular_value_table(const Instance& inst);
// Uniform draw from [0, R_max/(1-gamma)] per state.
ValueTable random_value_table(const Instance& inst, Rng& rng);

// sum over s' of P(s'|s,a) within 1e-9 of one for every (s,a), and cascades
// never deactivate.
CheckReport check_kernel_normalization(const Instance& inst);

// Sampling-path invariants at any scale: coin coupling x <= y, cascade
// monotonicity u subset-of s', and fixed-seed reproducibility.
CheckReport check_sampling_consistency(const Instance& inst,
                                       std::uint64_t seed);

// Marginal-gain inequality for exact Q over all (s, A subset B, t) triples
// (exhaustive for n <= 6, sampled above), plus the coupled-coin-profile
// decomposition of the expected future value as an independent oracle on
// tiny instances.
CheckReport check_submodularity(const Instance& inst,
                                std::span<const double> values,
                                double tolerance, std::uint64_t seed = 0);

// Per-state ratio Q(s, greedy) / max_A Q(s, A) against the 1 - 1/e bound on
// states where the monotone-submodular preconditions hold.
CheckReport check_greedy_ratio(const Instance& inst,
                               std::span<const double> values);

// Composite multi-Bellman value versus the hill-climbing Bellman operator,
// state by state.
CheckReport check_equivalence(const Instance& inst,
                              std::span<const double> values);

// Sup-norm ratio ||BV1 - BV2|| / ||V1 - V2|| over random table pairs; the
// optimal operator must contract (fail otherwise), the hill-climbing
// operator's excesses are preserved as findings with witness tables.
CheckReport check_contraction(const Instance& inst, BellmanOperator op,
                              int pairs, std::uint64_t seed);

// Geometric decay of value-iteration deltas and the induced error bound.
CheckReport check_value_iteration_rate(const Instance& inst,
                                       BellmanOperator op);

struct NamedInstance {
  std::string name;
  Instance inst;
};

// Bundled instances (n = 3..6) so verification runs with no external data.
std::vector<NamedInstance> builtin_small_suite();

// Every check on one instance, with caps reported as skipped verdicts.
std::vector<CheckReport> run_all_checks(const Instance& inst,
                                        const std::string& name,
                                        std::uint64_t seed);

nlohmann::json reports_to_json(const std::vector<CheckReport>& reports);
std::string reports_text(const std::vector<CheckReport>& reports);
bool any_failure(const std::vector<CheckReport>& reports);

}  // namespace nrmab
