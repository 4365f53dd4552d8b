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

// Runs each acceptance criterion at its stated budget and tolerance and prints
// one PASS/FAIL line per criterion. Exit status is the number of failures.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>

#include "hypo/config.hpp"
#include "hypo/runner.hpp"

using namespace hypo;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;
};

ExperimentConfig subset(const std::set<std::string>& names) {
  auto cfg = *preset_config("paper-suite");
  std::vector<CheckConfig> keep;
  for (const auto& c : cfg.checks)
    if (names.count(c.name)) keep.push_back(c);
  if (keep.size() != names.size()) throw std::runtime_error("paper-suite is missing a criterion check");
  cfg.checks = keep;
  return cfg;
}

std::vector<InequalityReport> run_subset(const std::set<std::string>& names) {
  RunOptions opts;
  opts.write_files = false;
  return run_experiment(subset(names), opts).reports;
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

Outcome count_rows(const std::vector<InequalityReport>& rows, std::size_t expected,
                   const std::function<bool(const InequalityReport&)>& good, const std::string& what) {
  Outcome o;
  std::size_t bad = 0, errors = 0;
  for (const auto& r : rows) {
    if (r.status == Status::Error || r.status == Status::Unsupported) ++errors;
    else if (!good(r)) ++bad;
  }
  o.ok = bad == 0 && errors == 0 && rows.size() == expected;
  o.detail = std::to_string(rows.size()) + "/" + std::to_string(expected) + " " + what + ", " +
             std::to_string(bad) + " violations, " + std::to_string(errors) + " errors";
  return o;
}

double worst(const std::vector<InequalityReport>& rows, const std::function<double(const InequalityReport&)>& f) {
  double w = std::numeric_limits<double>::infinity();
  for (const auto& r : rows) w = std::min(w, f(r));
  return w;
}

Outcome lemma(const std::string& name, std::size_t n, double tol) {
  const auto rows = run_subset({name});
  auto o = count_rows(rows, n, [tol](const InequalityReport& r) { return r.lhs - r.rhs <= tol; }, "instances");
  o.detail += ", worst rhs-lhs " + fmt(worst(rows, [](const InequalityReport& r) { return r.rhs - r.lhs; }));
  return o;
}

Outcome kolmogorov_suite() {
  const auto rows = run_subset({"kolmogorov-d1-gb1", "kolmogorov-d1-gb2", "kolmogorov-d1-rp", "kolmogorov-d1-rls",
                                "kolmogorov-d3-gb1", "kolmogorov-d3-gb2", "kolmogorov-d3-rp", "kolmogorov-d3-rls"});
  std::set<std::string> kinds;
  bool exact = true;
  for (const auto& r : rows) {
    kinds.insert(r.inequality + "@" + r.kernel);
    exact = exact && r.note == "exact";
  }
  // Margins are compared on the scale of the values; rows reach 1e15 at t = 5.
  auto rel = [](const InequalityReport& r) {
    return r.margin / std::max({1.0, std::abs(r.lhs), std::abs(r.rhs)});
  };
  auto o = count_rows(rows, rows.size(), [&](const InequalityReport& r) { return rel(r) >= -1e-9; }, "rows");
  o.ok = o.ok && exact && kinds.size() == 6 && !rows.empty();
  o.detail += ", worst scaled margin " + fmt(worst(rows, rel)) + (exact ? ", all closed form" : ", NOT all closed form");
  return o;
}

Outcome mc_pass(const std::string& name, std::size_t n) {
  const auto rows = run_subset({name});
  auto o = count_rows(rows, n, [](const InequalityReport& r) { return r.margin >= -3.0 * std::hypot(r.se_lhs, r.se_rhs); },
                      "rows");
  o.ok = o.ok && std::all_of(rows.begin(), rows.end(), [](const auto& r) { return r.status == Status::Pass; });
  o.detail += ", worst margin/se " + fmt(worst(rows, [](const InequalityReport& r) {
                return r.margin / std::max(1e-300, std::hypot(r.se_lhs, r.se_rhs));
              }));
  return o;
}

Outcome intertwining() {
  const auto rows = run_subset({"so4-intertwining"});
  auto o = count_rows(rows, 20, [](const InequalityReport& r) { return r.lhs < 3.0 * r.se_lhs; }, "functions");
  o.detail += ", largest gap/se " + fmt(-worst(rows, [](const InequalityReport& r) { return -r.lhs / r.se_lhs; }));
  return o;
}

Outcome all_pass(const std::string& name, std::size_t n) {
  const auto rows = run_subset({name});
  return count_rows(rows, n, [](const InequalityReport& r) { return r.status == Status::Pass; }, "rows");
}

Outcome kinetic() {
  const auto rows = run_subset({"kinetic-quadratic"});
  auto o = count_rows(rows, rows.size(), [](const InequalityReport& r) { return r.lhs <= r.rhs; }, "rows");
  o.ok = o.ok && !rows.empty();
  if (!rows.empty()) o.detail += ", " + rows.front().note;
  return o;
}

Outcome determinism() {
  namespace fs = std::filesystem;
  const fs::path base = fs::temp_directory_path() / "hypoineq-acceptance";
  std::string csv[2];
  for (int i = 0; i < 2; ++i) {
    RunOptions opts;
    opts.seed = 42;
    opts.out = (base / ("run" + std::to_string(i))).string();
    fs::remove_all(*opts.out);
    run_experiment(*preset_config("paper-suite"), opts);
    std::ifstream in(fs::path(*opts.out) / "reports.csv", std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    csv[i] = ss.str();
  }
  Outcome o;
  o.ok = !csv[0].empty() && csv[0] == csv[1];
  o.detail = "two paper-suite runs, " + std::to_string(csv[0].size()) + " bytes, " +
             (o.ok ? "identical" : "DIFFERENT");
  return o;
}

struct Criterion {
  int id;
  std::string title;
  double limit;
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "product Hellinger lemma", 5, [] { return lemma("product-hellinger", 1000, 1e-12); }},
      {2, "product Wasserstein lemma", 30, [] { return lemma("product-wasserstein", 200, 1e-9); }},
      {3, "Kolmogorov closed-form suite", 10, kolmogorov_suite},
      {4, "Kolmogorov Hellinger contraction", 1, [] { return all_pass("kolmogorov-hellinger", 27); }},
      {5, "Heisenberg reverse Poincare 1/t", 600, [] { return mc_pass("heisenberg-rp", 30); }},
      {6, "H3 x H3 tensorized reverse Poincare", 900, [] { return mc_pass("heisenberg-product-rp", 30); }},
      {7, "SO(4) intertwining", 300, intertwining},
      {8, "constants calculus", 5, [] { return all_pass("constants", 224); }},
      {9, "block diagonalization round trip", 10, [] { return all_pass("block-diagonalization", 100); }},
      {10, "kinetic Fokker-Planck fixed constant", 60, kinetic},
      {11, "determinism of paper-suite", 0, determinism},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = c.limit <= 0 || secs < c.limit;
    const bool ok = o.ok && in_time;
    failures += !ok;
    std::printf("[%s] criterion %2d %-38s %8.2f s%s  %s\n", ok ? "PASS" : "FAIL", c.id, c.title.c_str(), secs,
                c.limit > 0 ? (" (limit " + fmt(c.limit) + " s)").c_str() : "", o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", int(criteria.size()) - failures, criteria.size());
  return failures;
}
