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

#include <charconv>
#include <chrono>
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "nrmab/evaluation.hpp"
#include "nrmab/manifest.hpp"
#include "nrmab/verify.hpp"

namespace fs = std::filesystem;
using namespace nrmab;

namespace {

class Timer {
 public:
  double ms() const {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now() - t0_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point t0_ =
      std::chrono::steady_clock::now();
};

int cmd_ingest(const std::string& edges_path, const std::string& attrs_path,
               const std::string& out_path) {
  Timer timer;
  const EdgelistGraph graph = ingest_edgelist_file(edges_path);
  std::ifstream attrs_in(attrs_path);
  if (!attrs_in) {
    std::cerr << "cannot open attribute file: " << attrs_path << "\n";
    return 1;
  }
  nlohmann::json attrs;
  attrs_in >> attrs;
  const Instance inst = attach_attributes(graph, attrs);
  save_instance(inst, out_path);
  std::cout << "nodes: " << inst.n << "\n"
            << "edges: " << inst.edges.size() << "\n"
            << "self_loops_dropped: " << graph.self_loops_dropped << "\n"
            << "duplicates_collapsed: " << graph.duplicates_collapsed << "\n";
  RunManifest m;
  m.command = "ingest";
  m.config = {{"edges", edges_path}, {"attrs", attrs_path}, {"out", out_path}};
  m.add_output(out_path);
  m.duration_ms = timer.ms();
  m.save(out_path + ".manifest.json");
  return 0;
}

int cmd_gen(const GenSpec& spec, std::uint64_t seed,
            const std::string& out_path) {
  Timer timer;
  const Instance inst = generate_synthetic(spec, seed);
  save_instance(inst, out_path);
  std::cout << "nodes: " << inst.n << "\nedges: " << inst.edges.size() << "\n";
  RunManifest m;
  m.command = "gen";
  m.config = {{"n", spec.n},
              {"er_p", spec.er_p},
              {"edge_count", spec.edge_count},
              {"cascade_w", spec.cascade_w},
              {"budget_k", spec.budget_k},
              {"gamma", spec.gamma},
              {"reward_lo", spec.reward_lo},
              {"reward_hi", spec.reward_hi},
              {"out", out_path}};
  m.seeds = {seed};
  m.add_output(out_path);
  m.duration_ms = timer.ms();
  m.save(out_path + ".manifest.json");
  return 0;
}

nlohmann::json experiment_config_json(const ExperimentConfig& cfg,
                                      const std::string& instance_path) {
  return {{"instance", instance_path},
          {"policies", cfg.policies},
          {"seeds", cfg.seeds},
          {"runs_per_seed", cfg.runs_per_seed},
          {"horizon", cfg.horizon},
          {"measure_decision_time", cfg.measure_decision_time},
          {"lookahead_samples", cfg.params.lookahead_samples},
          {"rollout_horizon", cfg.params.rollout_horizon},
          {"rollouts", cfg.params.rollouts},
          {"train_episodes", cfg.params.train.episodes},
          {"train_steps", cfg.params.train.steps_per_episode},
          {"train_alpha", cfg.params.train.alpha},
          {"train_epsilon_start", cfg.params.train.epsilon_start},
          {"train_epsilon_end", cfg.params.train.epsilon_end}};
}

int cmd_evaluate(const std::string& instance_path, ExperimentConfig cfg,
                 const std::string& out_dir) {
  Timer timer;
  const Instance inst = load_instance(instance_path);
  fs::create_directories(out_dir);
  const ExperimentResult result = run_experiment(inst, cfg);
  const std::string csv_path = (fs::path(out_dir) / "episodes.csv").string();
  const std::string summary_path =
      (fs::path(out_dir) / "summary.json").string();
  write_text_file(csv_path, episodes_csv(result.episodes));
  write_text_file(summary_path, summary_json(result, cfg).dump(2) + "\n");
  for (const auto& [policy, err] : result.policy_errors)
    std::cerr << "policy '" << policy << "' failed to construct: " << err
              << "\n";
  for (const auto& s : result.summary)
    std::cout << s.policy << ": mean activation at t=" << cfg.horizon << " is "
              << (s.mean_activation.empty() ? 0.0 : s.mean_activation.back())
              << "\n";
  RunManifest m;
  m.command = "evaluate";
  m.config = experiment_config_json(cfg, instance_path);
  m.seeds = cfg.seeds;
  m.deterministic = !cfg.measure_decision_time;
  m.add_output(csv_path);
  m.add_output(summary_path);
  m.duration_ms = timer.ms();
  m.save((fs::path(out_dir) / "manifest.json").string());
  return 0;
}

int cmd_train(const std::string& instance_path, const std::string& learner,
              LearningConfig cfg, const std::string& out_dir) {
  Timer timer;
  const Instance inst = load_instance(instance_path);
  if (learner != "hc" && learner != "tabular") {
    std::cerr << "unknown learner '" << learner << "'; valid: hc tabular\n";
    return 1;
  }
  fs::create_directories(out_dir);
  LearningResult result;
  try {
    result = learner == "hc" ? q_learn_hc(inst, cfg)
                             : q_learn_tabular(inst, cfg);
  } catch (const std::invalid_argument& ex) {
    std::cerr << ex.what() << "\n";
    return 1;
  }
  const std::string table_path = (fs::path(out_dir) / "qtable.txt").string();
  const std::string curve_path = (fs::path(out_dir) / "curve.csv").string();
  save_qtable(result.table, table_path);
  std::ostringstream curve;
  curve << "episode,discounted_return,mean_activation\n";
  char buf[64];
  for (const auto& p : result.curve) {
    auto [q1, e1] = std::to_chars(buf, buf + sizeof(buf), p.discounted_return);
    curve << p.episode << ',' << std::string_view(buf, q1 - buf) << ',';
    auto [q2, e2] = std::to_chars(buf, buf + sizeof(buf), p.mean_activation);
    curve << std::string_view(buf, q2 - buf) << '\n';
  }
  write_text_file(curve_path, curve.str());
  std::cout << "episodes: " << result.curve.size() << "\n";
  if (!result.curve.empty())
    std::cout << "final return: " << result.curve.back().discounted_return
              << "\n";
  RunManifest m;
  m.command = "train";
  m.config = {{"instance", instance_path},
              {"learner", learner},
              {"episodes", cfg.episodes},
              {"steps_per_episode", cfg.steps_per_episode},
              {"alpha", cfg.alpha},
              {"alpha_inverse_visits", cfg.alpha_inverse_visits},
              {"epsilon_start", cfg.epsilon_start},
              {"epsilon_end", cfg.epsilon_end},
              {"q_init", cfg.q_init},
              {"random_start", cfg.random_start}};
  m.seeds = {cfg.seed};
  m.add_output(table_path);
  m.add_output(curve_path);
  m.duration_ms = timer.ms();
  m.save((fs::path(out_dir) / "manifest.json").string());
  return 0;
}

int cmd_verify(const std::string& instance_path, const std::string& suite,
               std::uint64_t seed, const std::string& out_path) {
  Timer timer;
  std::vector<CheckReport> reports;
  if (!instance_path.empty()) {
    const Instance inst = load_instance(instance_path);
    reports = run_all_checks(inst, fs::path(instance_path).stem().string(),
                             seed);
  } else if (suite == "small-suite" || suite == "small") {
    for (const auto& [name, inst] : builtin_small_suite()) {
      auto rs = run_all_checks(inst, name, seed);
      reports.insert(reports.end(), rs.begin(), rs.end());
    }
  } else {
    std::cerr << "unknown suite '" << suite << "'; valid: small-suite\n";
    return 1;
  }
  std::cout << reports_text(reports);
  if (!out_path.empty()) {
    write_text_file(out_path, reports_to_json(reports).dump(2) + "\n");
    RunManifest m;
    m.command = "verify";
    m.config = {{"instance", instance_path}, {"suite", suite}};
    m.seeds = {seed};
    m.add_output(out_path);
    m.duration_ms = timer.ms();
    m.save(out_path + ".manifest.json");
  }
  return any_failure(reports) ? 2 : 0;
}

int cmd_scaling(ScalingConfig cfg, const std::string& out_dir) {
  Timer timer;
  fs::create_directories(out_dir);
  const auto rows = runtime_scaling(cfg);
  const std::string csv_path = (fs::path(out_dir) / "scaling.csv").string();
  write_text_file(csv_path, scaling_csv(rows));
  std::cout << scaling_csv(rows);
  RunManifest m;
  m.command = "scaling";
  m.config = {{"hill_climb_sizes", cfg.hill_climb_sizes},
              {"tabular_sizes", cfg.tabular_sizes},
              {"hill_climb_k", cfg.hill_climb_k},
              {"tabular_k", cfg.tabular_k},
              {"trials", cfg.trials},
              {"lookahead_samples", cfg.lookahead_samples}};
  m.seeds = {cfg.seed};
  m.deterministic = false;  // wall-clock rows vary run to run
  m.add_output(csv_path);
  m.duration_ms = timer.ms();
  m.save((fs::path(out_dir) / "manifest.json").string());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"networked restless-bandit simulation and planning toolkit"};
  app.require_subcommand(1);

  // ingest
  auto* ingest = app.add_subcommand(
      "ingest", "build an instance from an edgelist and attribute document");
  std::string edges_path, attrs_path, out_path;
  ingest->add_option("--edges", edges_path, "edgelist file")->required();
  ingest->add_option("--attrs", attrs_path, "attribute JSON")->required();
  ingest->add_option("--out", out_path, "instance output path")->required();

  // gen
  auto* gen = app.add_subcommand("gen", "generate a synthetic instance");
  GenSpec spec;
  std::uint64_t gen_seed = 0;
  std::string gen_out;
  gen->add_option("--n", spec.n, "node count")->required();
  gen->add_option("--er-p", spec.er_p, "Erdos-Renyi edge probability");
  gen->add_option("--edge-count", spec.edge_count, "explicit edge count");
  gen->add_option("--w", spec.cascade_w, "cascade weight");
  gen->add_option("--k", spec.budget_k, "budget")->required();
  gen->add_option("--gamma", spec.gamma, "discount");
  gen->add_option("--reward-lo", spec.reward_lo, "reward range low");
  gen->add_option("--reward-hi", spec.reward_hi, "reward range high");
  gen->add_option("--seed", gen_seed, "generator seed");
  gen->add_option("--out", gen_out, "instance output path")->required();

  // evaluate
  auto* evaluate = app.add_subcommand(
      "evaluate", "run the multi-seed policy comparison experiment");
  std::string eval_instance, eval_out;
  ExperimentConfig ecfg;
  evaluate->add_option("--instance", eval_instance, "instance file")
      ->required();
  evaluate->add_option("--policies", ecfg.policies, "policy names")
      ->required()
      ->delimiter(',');
  evaluate->add_option("--seeds", ecfg.seeds, "master seeds")
      ->required()
      ->delimiter(',');
  evaluate->add_option("--runs", ecfg.runs_per_seed, "runs per seed");
  evaluate->add_option("--horizon", ecfg.horizon, "timesteps per episode");
  evaluate->add_flag("--measure-decision-time", ecfg.measure_decision_time,
                     "record wall-clock decision times (nondeterministic)");
  evaluate->add_option("--lookahead-samples", ecfg.params.lookahead_samples,
                       "Monte-Carlo samples per lookahead evaluation");
  evaluate->add_option("--rollout-horizon", ecfg.params.rollout_horizon,
                       "rollout Q horizon");
  evaluate->add_option("--rollouts", ecfg.params.rollouts,
                       "rollouts per Q evaluation");
  evaluate->add_option("--train-episodes", ecfg.params.train.episodes,
                       "training episodes for q-learning policies");
  evaluate->add_option("--train-steps",
                       ecfg.params.train.steps_per_episode,
                       "training steps per episode");
  evaluate->add_option("--out", eval_out, "output directory")->required();

  // train
  auto* train = app.add_subcommand("train", "train a tabular q-learner");
  std::string train_instance, train_learner = "hc", train_out;
  LearningConfig lcfg;
  train->add_option("--instance", train_instance, "instance file")->required();
  train->add_option("--learner", train_learner, "hc or tabular");
  train->add_option("--episodes", lcfg.episodes, "episodes");
  train->add_option("--steps", lcfg.steps_per_episode, "steps per episode");
  train->add_option("--alpha", lcfg.alpha, "learning rate");
  train->add_flag("--alpha-inverse-visits", lcfg.alpha_inverse_visits,
                  "use 1/visits learning rate");
  train->add_option("--epsilon-start", lcfg.epsilon_start, "initial epsilon");
  train->add_option("--epsilon-end", lcfg.epsilon_end, "final epsilon");
  train->add_option("--q-init", lcfg.q_init, "initial Q value");
  train->add_flag("--random-start", lcfg.random_start,
                  "random episode start states");
  train->add_option("--seed", lcfg.seed, "training seed");
  train->add_option("--out", train_out, "output directory")->required();

  // verify
  auto* verify = app.add_subcommand(
      "verify", "run the theory checks and emit a report");
  std::string verify_instance, verify_suite = "small-suite", verify_out;
  std::uint64_t verify_seed = 0;
  verify->add_option("--instance", verify_instance,
                     "instance file (overrides --suite)");
  verify->add_option("--suite", verify_suite, "builtin suite name");
  verify->add_option("--seed", verify_seed, "check seed");
  verify->add_option("--out", verify_out, "report JSON path");

  // scaling
  auto* scaling = app.add_subcommand(
      "scaling", "measure per-decision and per-sweep runtime scaling");
  ScalingConfig scfg;
  std::string scaling_out;
  scaling->add_option("--hc-sizes", scfg.hill_climb_sizes,
                      "hill-climbing graph sizes")
      ->delimiter(',');
  scaling->add_option("--tabular-sizes", scfg.tabular_sizes,
                      "tabular graph sizes")
      ->delimiter(',');
  scaling->add_option("--hc-k", scfg.hill_climb_k, "hill-climbing budget");
  scaling->add_option("--tabular-k", scfg.tabular_k, "tabular budget");
  scaling->add_option("--trials", scfg.trials, "timing trials");
  scaling->add_option("--lookahead-samples", scfg.lookahead_samples,
                      "samples per Q evaluation");
  scaling->add_option("--seed", scfg.seed, "seed");
  scaling->add_option("--out", scaling_out, "output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*ingest) return cmd_ingest(edges_path, attrs_path, out_path);
    if (*gen) return cmd_gen(spec, gen_seed, gen_out);
    if (*evaluate) return cmd_evaluate(eval_instance, ecfg, eval_out);
    if (*train) return cmd_train(train_instance, train_learner, lcfg,
                                 train_out);
    if (*verify) return cmd_verify(verify_instance, verify_suite, verify_seed,
                                   verify_out);
    if (*scaling) return cmd_scaling(scfg, scaling_out);
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 1;
  }
  return 0;
}
