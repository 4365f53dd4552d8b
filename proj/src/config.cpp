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

#include "hypo/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "hypo/kernel.hpp"
#include "hypo/test_functions.hpp"

namespace hypo {

ConfigError::ConfigError(const std::string& source, int line, const std::string& msg)
    : InputError(source + ":" + std::to_string(line) + ": " + msg), line_(line) {}

const std::vector<std::string>& check_types() {
  static const std::vector<std::string> types = {
      "gradient_bound",     "reverse_poincare",    "reverse_log_sobolev",   "li_yau",
      "wang_harnack",       "parabolic_harnack",   "wasserstein_contraction", "hellinger_contraction",
      "intertwining",       "product_hellinger",   "product_wasserstein",   "constants_calculus",
      "block_diagonalization", "kinetic_rpi"};
  return types;
}

namespace {

class Parser {
 public:
  explicit Parser(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail(const YAML::Node& node, const std::string& msg) const {
    throw ConfigError(source_, node.IsDefined() ? node.Mark().line + 1 : 0, msg);
  }

  template <typename T>
  T scalar(const YAML::Node& node, const std::string& what) const {
    if (!node.IsScalar()) fail(node, what + " must be a scalar");
    try {
      return node.as<T>();
    } catch (const YAML::Exception&) {
      fail(node, "bad value for " + what + ": '" + node.Scalar() + "'");
    }
  }

  std::vector<double> reals(const YAML::Node& node, const std::string& what) const {
    if (!node.IsSequence()) fail(node, what + " must be a list of numbers");
    std::vector<double> out;
    for (const auto& x : node) out.push_back(scalar<double>(x, what));
    return out;
  }

  Point point(const YAML::Node& node, const std::string& what) const {
    const auto v = reals(node, what);
    return Eigen::Map<const Eigen::VectorXd>(v.data(), Eigen::Index(v.size()));
  }

  std::vector<std::string> strings(const YAML::Node& node, const std::string& what) const {
    std::vector<std::string> out;
    if (node.IsScalar()) {
      out.push_back(node.Scalar());
    } else if (node.IsSequence()) {
      for (const auto& x : node) out.push_back(scalar<std::string>(x, what));
    } else {
      fail(node, what + " must be a string or a list of strings");
    }
    return out;
  }

  CheckConfig check(const YAML::Node& node, int index) const {
    if (!node.IsMap()) fail(node, "each check must be a mapping");
    static const std::set<std::string> known = {
        "name",    "type",      "kernel",   "direct_kernel", "functions", "points",    "y",
        "pushed_point", "times", "constant", "li_yau",        "form",      "p",         "q",
        "s",       "n",         "instances", "samples",      "bootstrap", "sigma",     "gaps",
        "potentials", "dims",   "paths",    "dt",            "grid"};
    CheckConfig c;
    c.line = node.Mark().line + 1;
    for (const auto& kv : node) {
      const auto key = kv.first.as<std::string>();
      if (!known.count(key)) fail(kv.first, "unknown check key '" + key + "'");
    }
    if (!node["type"]) fail(node, "check is missing 'type'");
    c.type = scalar<std::string>(node["type"], "type");
    bool valid_type = false;
    for (const auto& t : check_types()) valid_type |= t == c.type;
    if (!valid_type) fail(node["type"], "unknown check type '" + c.type + "'");
    c.name = node["name"] ? scalar<std::string>(node["name"], "name") : c.type + std::to_string(index);
    if (node["kernel"]) {
      c.kernel = scalar<std::string>(node["kernel"], "kernel");
      try {
        make_kernel(c.kernel, 1e-3);
      } catch (const std::exception& e) {
        fail(node["kernel"], e.what());
      }
    }
    if (node["direct_kernel"]) {
      c.direct_kernel = scalar<std::string>(node["direct_kernel"], "direct_kernel");
      try {
        make_kernel(c.direct_kernel, 1e-3);
      } catch (const std::exception& e) {
        fail(node["direct_kernel"], e.what());
      }
    }
    if (node["functions"]) {
      c.functions = strings(node["functions"], "functions");
      for (const auto& f : c.functions) {
        bool ok = false;
        for (const auto& n : function_family_names()) ok |= n == f;
        if (!ok) fail(node["functions"], "unknown function family '" + f + "'");
      }
    }
    if (node["points"]) {
      if (!node["points"].IsSequence()) fail(node["points"], "points must be a list of points");
      for (const auto& p : node["points"]) c.points.push_back(point(p, "point"));
    }
    if (node["y"]) c.y = point(node["y"], "y");
    if (node["pushed_point"]) c.pushed_point = point(node["pushed_point"], "pushed_point");
    if (node["times"]) {
      c.times = reals(node["times"], "times");
      for (double t : c.times)
        if (!(t > 0.0)) fail(node["times"], "times must be positive");
    }
    if (node["constant"]) c.constant = scalar<std::string>(node["constant"], "constant");
    if (node["li_yau"]) c.li_yau = scalar<std::string>(node["li_yau"], "li_yau");
    if (node["form"]) c.form = scalar<std::string>(node["form"], "form");
    if (node["p"]) c.p = scalar<double>(node["p"], "p");
    if (node["q"]) c.q = scalar<double>(node["q"], "q");
    if (node["s"]) c.s = scalar<double>(node["s"], "s");
    if (node["n"]) c.n = scalar<int>(node["n"], "n");
    if (node["instances"]) c.instances = scalar<int>(node["instances"], "instances");
    if (node["samples"]) c.samples = scalar<int>(node["samples"], "samples");
    if (node["bootstrap"]) c.bootstrap = scalar<int>(node["bootstrap"], "bootstrap");
    if (node["grid"]) c.grid = scalar<int>(node["grid"], "grid");
    if (node["sigma"]) c.sigma = reals(node["sigma"], "sigma");
    if (node["gaps"]) c.gaps = reals(node["gaps"], "gaps");
    if (node["potentials"]) c.potentials = strings(node["potentials"], "potentials");
    if (node["dims"]) {
      for (double d : reals(node["dims"], "dims")) c.dims.push_back(int(d));
    }
    if (node["paths"]) {
      c.paths = scalar<long>(node["paths"], "paths");
      if (*c.paths < 2) fail(node["paths"], "paths must be at least 2");
    }
    if (node["dt"]) {
      c.dt = scalar<double>(node["dt"], "dt");
      if (!(*c.dt > 0.0)) fail(node["dt"], "dt must be positive");
    }
    static const std::set<std::string> forms = {"horizontal", "kolmogorov", "kolmogorov-half",
                                                "kolmogorov-twisted"};
    if (!forms.count(c.form)) fail(node["form"], "unknown gradient form '" + c.form + "'");
    const bool needs_kernel = c.type != "hellinger_contraction" && c.type != "product_hellinger" &&
                              c.type != "product_wasserstein" && c.type != "constants_calculus" &&
                              c.type != "block_diagonalization" && c.type != "kinetic_rpi";
    if (needs_kernel && c.kernel.empty()) fail(node, "check '" + c.name + "' needs a kernel");
    if (c.type == "intertwining" && c.direct_kernel.empty()) fail(node, "intertwining needs direct_kernel");
    return c;
  }

  ExperimentConfig config(const YAML::Node& root) const {
    ExperimentConfig cfg;
    if (root.IsNull()) return cfg;
    if (!root.IsMap()) fail(root, "config must be a mapping");
    static const std::set<std::string> known = {"seed", "paths", "dt", "output", "workers", "checks", "preset"};
    for (const auto& kv : root) {
      const auto key = kv.first.as<std::string>();
      if (!known.count(key)) fail(kv.first, "unknown key '" + key + "'");
    }
    if (root["preset"]) {
      const auto name = scalar<std::string>(root["preset"], "preset");
      auto p = preset_config(name);
      if (!p) fail(root["preset"], "unknown preset '" + name + "'");
      cfg = *p;
    }
    if (root["seed"]) cfg.seed = scalar<std::uint64_t>(root["seed"], "seed");
    if (root["paths"]) {
      cfg.paths = scalar<long>(root["paths"], "paths");
      if (cfg.paths < 2) fail(root["paths"], "paths must be at least 2");
    }
    if (root["dt"]) {
      cfg.dt = scalar<double>(root["dt"], "dt");
      if (!(cfg.dt > 0.0)) fail(root["dt"], "dt must be positive");
    }
    if (root["output"]) cfg.output = scalar<std::string>(root["output"], "output");
    if (root["workers"]) {
      cfg.workers = scalar<int>(root["workers"], "workers");
      if (cfg.workers < 0) fail(root["workers"], "workers must be nonnegative");
    }
    if (root["checks"]) {
      const auto& checks = root["checks"];
      if (checks.IsNull()) return cfg;
      if (!checks.IsSequence()) fail(checks, "checks must be a list");
      int i = 0;
      for (const auto& c : checks) cfg.checks.push_back(check(c, i++));
    }
    std::set<std::string> names;
    for (const auto& c : cfg.checks) {
      if (!names.insert(c.name).second) throw ConfigError(source_, c.line, "duplicate check name '" + c.name + "'");
    }
    return cfg;
  }

 private:
  std::string source_;
};

const char* kPaperSuite = R"(seed: 42
paths: 100000
dt: 1.0e-3
checks:
  - name: product-hellinger
    type: product_hellinger
    instances: 1000
  - name: product-wasserstein
    type: product_wasserstein
    instances: 200
  - name: kolmogorov-d1-gb1
    type: gradient_bound
    kernel: "kolmogorov:0.7"
    functions: [exp-linear, coordinates, constants]
    points: [[0, 0], [0.5, -0.3]]
    times: [0.1, 1, 5]
    p: 1
    form: kolmogorov
  - name: kolmogorov-d1-gb2
    type: gradient_bound
    kernel: "kolmogorov:0.7"
    functions: [exp-linear, coordinates]
    points: [[0, 0], [0.5, -0.3]]
    times: [0.1, 1, 5]
    p: 2
    form: kolmogorov
  - name: kolmogorov-d1-gb-half
    type: gradient_bound
    kernel: "kolmogorov:0.7"
    functions: [exp-linear, coordinates]
    points: [[0, 0], [0.5, -0.3]]
    times: [0.1, 1, 5]
    p: 1
    form: kolmogorov-half
  - name: kolmogorov-d1-rp
    type: reverse_poincare
    kernel: "kolmogorov:0.7"
    functions: [exp-linear, coordinates, constants]
    points: [[0, 0], [0.5, -0.3]]
    times: [0.1, 1, 5]
    constant: kolmogorov
    form: kolmogorov-twisted
  - name: kolmogorov-d1-rls
    type: reverse_log_sobolev
    kernel: "kolmogorov:0.7"
    functions: [exp-linear]
    points: [[0, 0], [0.5, -0.3]]
    times: [0.1, 1, 5]
    constant: kolmogorov
    form: kolmogorov-twisted
  - name: kolmogorov-d3-gb1
    type: gradient_bound
    kernel: "kolmogorov:0.5,1,2"
    functions: [exp-linear, coordinates]
    points: [[0, 0, 0, 0, 0, 0], [0.2, -0.1, 0.4, 0.3, 0, -0.5]]
    times: [0.1, 1, 5]
    p: 1
    form: kolmogorov
  - name: kolmogorov-d3-gb2
    type: gradient_bound
    kernel: "kolmogorov:0.5,1,2"
    functions: [exp-linear, coordinates]
    points: [[0, 0, 0, 0, 0, 0], [0.2, -0.1, 0.4, 0.3, 0, -0.5]]
    times: [0.1, 1, 5]
    p: 2
    form: kolmogorov
  - name: kolmogorov-d3-gb-half
    type: gradient_bound
    kernel: "kolmogorov:0.5,1,2"
    functions: [exp-linear, coordinates]
    points: [[0, 0, 0, 0, 0, 0], [0.2, -0.1, 0.4, 0.3, 0, -0.5]]
    times: [0.1, 1, 5]
    p: 1
    form: kolmogorov-half
  - name: kolmogorov-d3-rp
    type: reverse_poincare
    kernel: "kolmogorov:0.5,1,2"
    functions: [exp-linear, coordinates]
    points: [[0, 0, 0, 0, 0, 0], [0.2, -0.1, 0.4, 0.3, 0, -0.5]]
    times: [0.1, 1, 5]
    constant: kolmogorov
    form: kolmogorov-twisted
  - name: kolmogorov-d3-rls
    type: reverse_log_sobolev
    kernel: "kolmogorov:0.5,1,2"
    functions: [exp-linear]
    points: [[0, 0, 0, 0, 0, 0], [0.2, -0.1, 0.4, 0.3, 0, -0.5]]
    times: [0.1, 1, 5]
    constant: kolmogorov
    form: kolmogorov-twisted
  - name: kolmogorov-hellinger
    type: hellinger_contraction
    sigma: [0.5, 1, 2]
    times: [0.1, 1, 5]
    gaps: [0.1, 0.5, 1]
  - name: heisenberg-rp
    type: reverse_poincare
    kernel: heisenberg3
    functions: bumps
    points: [[0, 0, 0]]
    times: [0.25, 0.5, 1]
    constant: 1/t
    paths: 1000000
  - name: heisenberg-product-rp
    type: reverse_poincare
    kernel: "product:[heisenberg3,heisenberg3]"
    functions: bumps
    points: [[0, 0, 0, 0, 0, 0]]
    times: [0.25, 0.5, 1]
    constant: 1/t
    paths: 1000000
  - name: so4-intertwining
    type: intertwining
    kernel: so4-from-model
    direct_kernel: so4
    functions: random-sin
    times: [0.3]
    paths: 100000
  - name: constants
    type: constants_calculus
  - name: block-diagonalization
    type: block_diagonalization
    instances: 100
  - name: kinetic-quadratic
    type: kinetic_rpi
    potentials: [quad1]
    times: [0.05, 5]
    grid: 200
    instances: 10
    dims: [1, 3]
)";

const char* kSmoke = R"(seed: 7
paths: 2000
dt: 1.0e-2
checks:
  - name: heisenberg-rp
    type: reverse_poincare
    kernel: heisenberg3
    functions: bumps
    points: [[0, 0, 0]]
    times: [0.5]
    constant: 1/t
  - name: heisenberg-rls
    type: reverse_log_sobolev
    kernel: heisenberg3
    functions: positive-bumps
    points: [[0, 0, 0]]
    times: [0.5]
    constant: 5/t
  - name: heisenberg-li-yau
    type: li_yau
    kernel: heisenberg3
    functions: positive-bumps
    points: [[0, 0, 0]]
    times: [0.5, 1]
    li_yau: carnot:1
  - name: kolmogorov-rp
    type: reverse_poincare
    kernel: "kolmogorov:1"
    functions: [exp-linear, coordinates]
    points: [[0, 0]]
    times: [1]
    constant: kolmogorov
    form: kolmogorov-twisted
)";

}  // namespace

ExperimentConfig parse_config(const std::string& text, const std::string& source) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(source, e.mark.line + 1, e.msg);
  }
  return Parser(source).config(root);
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, 0, "cannot open config file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

std::optional<ExperimentConfig> preset_config(const std::string& name) {
  const char* text = nullptr;
  if (name == "paper-suite") text = kPaperSuite;
  if (name == "smoke") text = kSmoke;
  if (!text) return std::nullopt;
  auto cfg = parse_config(text, "preset:" + name);
  cfg.preset = name;
  return cfg;
}

std::vector<std::string> preset_names() { return {"paper-suite", "smoke"}; }

}  // namespace hypo
