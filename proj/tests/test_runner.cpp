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
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "hypo/config.hpp"
#include "hypo/runner.hpp"

using namespace hypo;
using doctest::Approx;

namespace {

std::string csv_of(const std::vector<InequalityReport>& rows) {
  std::ostringstream os;
  write_csv_header(os);
  for (const auto& r : rows) write_csv_row(os, r);
  return os.str();
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int line_of(const std::string& text) {
  try {
    parse_config(text, "t.yaml");
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    CHECK(msg.rfind("t.yaml:", 0) == 0);
    return std::stoi(msg.substr(7));
  }
  return -1;
}

}  // namespace

TEST_CASE("config parses defaults and overrides") {
  const auto cfg = parse_config(R"(seed: 9
paths: 500
checks:
  - name: a
    type: reverse_poincare
    kernel: heisenberg3
    functions: bumps
    times: [0.5]
    constant: 1/t
    paths: 100
)");
  CHECK(cfg.seed == 9);
  CHECK(cfg.paths == 500);
  CHECK(cfg.dt == Approx(1e-3));
  REQUIRE(cfg.checks.size() == 1);
  CHECK(cfg.checks[0].paths.value() == 100);
  CHECK(cfg.checks[0].line == 4);
}

TEST_CASE("config errors carry line numbers") {
  CHECK(line_of("seed: 1\npaths: -3\n") == 2);
  CHECK(line_of("seed: 1\nbogus: 3\n") == 2);
  CHECK(line_of("checks:\n  - name: a\n    type: nonsense\n") == 3);
  CHECK(line_of("checks:\n  - name: a\n    type: reverse_poincare\n    kernel: nowhere\n") == 4);
  CHECK(line_of("checks:\n  - name: a\n    type: reverse_poincare\n    kernel: heisenberg3\n    colour: red\n") == 5);
  CHECK(line_of(R"(checks:
  - name: a
    type: constants_calculus
  - name: a
    type: constants_calculus
)") == 4);
  CHECK_THROWS_AS(parse_config("seed: [1, 2"), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/config.yaml"), ConfigError);
}

TEST_CASE("presets parse") {
  for (const auto& name : preset_names()) {
    INFO(name);
    const auto cfg = preset_config(name);
    REQUIRE(cfg.has_value());
    CHECK_FALSE(cfg->checks.empty());
  }
  CHECK_FALSE(preset_config("nope").has_value());
  CHECK(parse_config("preset: smoke\n").checks.size() == preset_config("smoke")->checks.size());
}

TEST_CASE("constant expressions") {
  CHECK(parse_constant("2.5", "heisenberg3")(3.0) == 2.5);
  CHECK(parse_constant("5/t", "heisenberg3")(2.0) == Approx(2.5));
  CHECK(parse_constant("kolmogorov", "kolmogorov:0.5,1,2")(2.0) == Approx(1.0 / (0.25 * 2.0)));
  CHECK(parse_constant("kolmogorov", "product:[kolmogorov:3,kolmogorov:0.1]")(1.0) == Approx(100.0));
  CHECK(parse_constant("transverse-rp:heisenberg:1", "heisenberg3")(0.5) == Approx(5.0));
  CHECK(parse_constant("mean-operator-norm", "euclidean:2")(1.0) == Approx(1.0));
  CHECK_THROWS_AS(parse_constant("kolmogorov", "heisenberg3"), InputError);
  CHECK_THROWS_AS(parse_constant("abc", "heisenberg3"), InputError);
  CHECK_THROWS_AS(parse_constant("", "heisenberg3"), InputError);
}

TEST_CASE("list-presets names the ids") {
  const auto s = list_presets();
  for (const char* id : {"heisenberg3", "so4", "vandermonde:n:m", "euclidean:d", "kolmogorov-control:d:t",
                         "product:[", "paper-suite", "smoke", "reverse_poincare"})
    CHECK_MESSAGE(s.find(id) != std::string::npos, id);
}

TEST_CASE("empty check list writes a header-only report") {
  const auto dir = std::filesystem::temp_directory_path() / "hypoineq-empty";
  std::filesystem::remove_all(dir);
  RunOptions opts;
  opts.out = dir.string();
  const auto res = run_experiment(parse_config("seed: 1\n"), opts);
  CHECK(res.exit_code == kExitOk);
  CHECK(res.reports.empty());
  CHECK(read_file(dir / "reports.csv") == csv_of({}));
  CHECK(std::filesystem::exists(dir / "summary.json"));
  CHECK(read_file(dir / "manifest.json").find("\"seed\": 1") != std::string::npos);
}

TEST_CASE("reports do not depend on the worker count") {
  auto cfg = *preset_config("smoke");
  cfg.paths = 300;
  RunOptions one, many;
  one.write_files = many.write_files = false;
  one.workers = 1;
  many.workers = 3;
  const auto a = run_experiment(cfg, one), b = run_experiment(cfg, many), c = run_experiment(cfg, one);
  CHECK(csv_of(a.reports) == csv_of(b.reports));
  CHECK(csv_of(a.reports) == csv_of(c.reports));
  RunOptions seeded = one;
  seeded.seed = 8;
  CHECK(csv_of(run_experiment(cfg, seeded).reports) != csv_of(a.reports));
}

TEST_CASE("theorem violations set the exit code") {
  const auto cfg = parse_config(R"(paths: 2000
dt: 1.0e-2
checks:
  - name: too-small
    type: reverse_poincare
    kernel: heisenberg3
    functions: coordinates
    points: [[0, 0, 0]]
    times: [0.5]
    constant: 0.1/t
)");
  RunOptions opts;
  opts.write_files = false;
  const auto res = run_experiment(cfg, opts);
  CHECK(res.violations > 0);
  CHECK(res.exit_code == kExitViolation);
}

TEST_CASE("check-level errors are recorded per row") {
  const auto cfg = parse_config(R"(checks:
  - name: needs-y
    type: wang_harnack
    kernel: "kolmogorov:1"
    functions: exp-linear
    times: [1]
    constant: kolmogorov
  - name: fine
    type: constants_calculus
)");
  RunOptions opts;
  opts.write_files = false;
  const auto res = run_experiment(cfg, opts);
  REQUIRE_FALSE(res.reports.empty());
  CHECK(res.reports.front().status == Status::Error);
  CHECK(res.reports.front().job == "needs-y#0");
  CHECK(res.errors == 1);
  CHECK(res.reports.back().job == "fine#0");
}
