// Copyright 2026 The Ideatree Authors.
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


// ideatree: run budgeted searches, validate configs, replay run logs and
// write reports.

#include <iostream>

#include "CLI11.hpp"
#include "ideatree/cli/commands.hpp"

int main(int argc, char** argv) {
  using namespace ideatree;
  CLI::App app{"Budgeted ideation-tree search over ML pipeline ideas"};
  app.require_subcommand(1);

  RunCommand run;
  std::string config, dataset, out;
  std::uint64_t seed = 0;
  std::string ports;
  auto* run_cmd = app.add_subcommand("run", "Run setup, initialization and the main loop");
  run_cmd->add_option("--config", config, "Run configuration (JSON); defaults when omitted")
      ->check(CLI::ExistingFile);
  run_cmd->add_option("--dataset", dataset, "Dataset directory")->check(CLI::ExistingDirectory);
  run_cmd->add_option("--out", out, "Run directory to create")->required();
  auto* seed_opt = run_cmd->add_option("--seed", seed, "Seed (overrides the config)");
  auto* ports_opt = run_cmd->add_option("--ports", ports, "Port set (overrides the config)")
                        ->check(CLI::IsMember({"synthetic", "llm+subprocess", "llm"}));

  std::string validate_path;
  auto* validate_cmd = app.add_subcommand("validate-config", "Check a run configuration");
  validate_cmd->add_option("--config,config", validate_path, "Run configuration (JSON)")
      ->required();

  std::string replay_dir;
  auto* replay_cmd =
      app.add_subcommand("replay", "Rebuild the tree from the run log and compare it");
  replay_cmd->add_option("--run,run", replay_dir, "Run directory")->required();

  ReportCommand report;
  std::vector<std::string> report_runs;
  std::string leaderboard, report_out;
  auto* report_cmd = app.add_subcommand("report", "Write report tables for one or more runs");
  report_cmd->add_option("runs", report_runs, "Run directories")->required();
  report_cmd->add_option("--mode", report.mode, "progress, ablation or acceleration")
      ->check(CLI::IsMember({"progress", "ablation", "acceleration"}));
  report_cmd->add_option("--leaderboard", leaderboard, "Human leaderboard score file");
  report_cmd->add_option("--out", report_out, "Report directory (default <run>/report)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitConfigInvalid;
  }

  if (*run_cmd) {
    if (!config.empty()) run.config = config;
    if (!dataset.empty()) run.dataset = dataset;
    run.out = out;
    if (*seed_opt) run.seed = seed;
    if (*ports_opt) run.ports = ports;
    return cmd_run(run, std::cout, std::cerr);
  }
  if (*validate_cmd) return cmd_validate_config(validate_path, std::cout, std::cerr);
  if (*replay_cmd) return cmd_replay(replay_dir, std::cout, std::cerr);
  for (const auto& r : report_runs) report.runs.emplace_back(r);
  if (!leaderboard.empty()) report.leaderboard = leaderboard;
  if (!report_out.empty()) report.out = report_out;
  return cmd_report(report, std::cout, std::cerr);
}
