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
#include <optional>
#include <string>
#include <vector>

#include "hypo/core.hpp"

namespace hypo {

/// Configuration problem anchored to a line of the source file (0 if none).
class ConfigError : public InputError {
 public:
  ConfigError(const std::string& source, int line, const std::string& msg);
  int line() const { return line_; }

 private:
  int line_;
};

/// One declared check. Which fields are read depends on `type`; see
/// list_presets() for the schema.
struct CheckConfig {
  std::string name;
  std::string type;
  int line = 0;

  std::string kernel;
  std::string direct_kernel;
  std::vector<std::string> functions;
  std::vector<Point> points;
  std::optional<Point> y;
  std::optional<Point> pushed_point;
  std::vector<double> times;
  std::string constant;
  std::string li_yau;
  std::string form = "horizontal";
  double p = 1.0;
  double q = 2.0;
  double s = 0.0;
  int n = 1;
  int instances = 0;
  int samples = 512;
  int bootstrap = 10;
  int grid = 200;
  std::vector<double> sigma;
  std::vector<double> gaps;
  std::vector<std::string> potentials;
  std::vector<int> dims;
  std::optional<long> paths;
  std::optional<double> dt;
};

struct ExperimentConfig {
  std::uint64_t seed = 42;
  long paths = 100000;
  double dt = 1e-3;
  /// Empty: --out flag, then HYPOINEQ_OUT, then "hypoineq-out".
  std::string output;
  int workers = 0;
  std::vector<CheckConfig> checks;
  /// Preset name when the config came from one.
  std::string preset;
};

const std::vector<std::string>& check_types();

ExperimentConfig parse_config(const std::string& text, const std::string& source = "config");
ExperimentConfig load_config(const std::string& path);

/// Built-in experiment presets by name ("paper-suite", "smoke").
std::optional<ExperimentConfig> preset_config(const std::string& name);
std::vector<std::string> preset_names();

}  // namespace hypo
