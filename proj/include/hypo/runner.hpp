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

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hypo/config.hpp"
#include "hypo/inequality.hpp"
#include "hypo/report.hpp"

namespace hypo {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitViolation = 3;

/// Command-line overrides; unset fields keep the config values.
struct RunOptions {
  std::optional<std::uint64_t> seed;
  std::optional<long> paths;
  std::optional<double> dt;
  std::optional<int> workers;
  std::optional<std::string> out;
  /// Skip writing files (reports are still returned).
  bool write_files = true;
  std::ostream* log = nullptr;
};

struct RunResult {
  std::vector<InequalityReport> reports;
  int violations = 0;
  int errors = 0;
  int exit_code = kExitOk;
  std::string output_dir;
};

/// Expands checks into jobs (one per check and point), runs them on a worker
/// pool and gathers rows in job order. Each job's random stream is keyed by
/// (seed, job id), so output does not depend on the schedule.
RunResult run_experiment(const ExperimentConfig& cfg, const RunOptions& opts = {});

/// Constant expressions: a number, "<c>/t", "kolmogorov" (1/(sigma^2 t)),
/// "transverse-rp:<group>", "transverse-rls:<group>", "cd-rp:<group>",
/// "cd-rls:<group>", "mean-operator-norm".
ConstantFn parse_constant(const std::string& expr, const std::string& kernel_id, double dt = 1e-3);

std::string summary_json(const std::vector<InequalityReport>& reports, const ExperimentConfig& cfg);
std::string list_presets();

}  // namespace hypo
