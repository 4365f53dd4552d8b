// Copyright 2026 The hypoineq Authors
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

#include <filesystem>
#include <iostream>

#include "CLI11.hpp"
#include "hypo/config.hpp"
#include "hypo/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Numerical checks of functional inequalities for hypoelliptic semigroups"};
  app.require_subcommand(1);

  hypo::RunOptions opts;
  std::string target;
  std::uint64_t seed = 0;
  long paths = 0;
  double dt = 0.0;
  int workers = 0;
  std::string out;
  bool quiet = false;

  auto* run = app.add_subcommand("run", "Run a config file or a named preset");
  run->add_option("config", target, "YAML config path or preset name")->required();
  auto* seed_opt = run->add_option("--seed", seed, "Master seed");
  auto* paths_opt = run->add_option("--paths", paths, "Monte Carlo paths per job")->check(CLI::PositiveNumber);
  auto* dt_opt = run->add_option("--dt", dt, "SDE time step")->check(CLI::PositiveNumber);
  auto* workers_opt = run->add_option("--workers", workers, "Worker threads (default: all cores)")
                          ->check(CLI::PositiveNumber);
  auto* out_opt = run->add_option("--out", out, "Output directory (default: $HYPOINEQ_OUT or ./hypoineq-out)");
  run->add_flag("-q,--quiet", quiet, "No progress log");

  app.add_subcommand("list-presets", "List space, kernel, group, family and check ids");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : hypo::kExitConfig;
  }

  if (app.got_subcommand("list-presets")) {
    std::cout << hypo::list_presets();
    return hypo::kExitOk;
  }

  hypo::ExperimentConfig cfg;
  try {
    if (std::filesystem::is_regular_file(target)) {
      cfg = hypo::load_config(target);
    } else if (auto preset = hypo::preset_config(target)) {
      cfg = *preset;
    } else {
      std::cerr << target << ": no such file or preset\n";
      return hypo::kExitConfig;
    }
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return hypo::kExitConfig;
  }

  if (*seed_opt) opts.seed = seed;
  if (*paths_opt) opts.paths = paths;
  if (*dt_opt) opts.dt = dt;
  if (*workers_opt) opts.workers = workers;
  if (*out_opt) opts.out = out;
  if (!quiet) opts.log = &std::cerr;

  try {
    const auto res = hypo::run_experiment(cfg, opts);
    std::cerr << res.reports.size() << " rows, " << res.violations << " violations, " << res.errors
              << " errors -> " << res.output_dir << "\n";
    return res.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
