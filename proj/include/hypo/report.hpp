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

#include <iosfwd>
#include <string>
#include <vector>

#include "hypo/core.hpp"

namespace hypo {

enum class Status { Pass, Fail, Inconclusive, Error, Unsupported };

std::string to_string(Status s);

/// One evaluated inequality instance: lhs <= rhs is what is being checked.
struct InequalityReport {
  std::string job;
  std::string inequality;
  std::string kernel;
  std::string function;
  Point point;
  double t = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  double se_lhs = 0.0;
  double se_rhs = 0.0;
  double margin = 0.0;
  Status status = Status::Pass;
  std::string note;
  /// Informational rows never count as theorem violations.
  bool informational = false;
};

struct Verdict {
  double k = 3.0;            // stderr multiplier
  double tolerance = 0.0;    // absolute slack for exact evaluations
  double inconclusive_ratio = 0.1;
  bool allow_inconclusive = true;
};

/// Fills margin and status from lhs, rhs and standard errors.
void finalize(InequalityReport& r, const Verdict& v = {});

InequalityReport error_report(std::string inequality, std::string kernel,
                              std::string function, const Point& point, double t,
                              const std::string& message,
                              Status status = Status::Error);

/// Fixed column order of reports.csv.
const std::vector<std::string>& report_columns();
void write_csv_header(std::ostream& os);
void write_csv_row(std::ostream& os, const InequalityReport& r);
/// Numbers are written with %.17g so files round-trip exactly.
std::string format_real(double x);

}  // namespace hypo
