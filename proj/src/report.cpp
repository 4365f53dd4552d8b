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

#include "hypo/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace hypo {

std::string to_string(Status s) {
  switch (s) {
    case Status::Pass: return "pass";
    case Status::Fail: return "fail";
    case Status::Inconclusive: return "inconclusive";
    case Status::Error: return "error";
    case Status::Unsupported: return "unsupported";
  }
  return "unknown";
}

void finalize(InequalityReport& r, const Verdict& v) {
  r.margin = r.rhs - r.lhs;
  if (!std::isfinite(r.lhs) || !std::isfinite(r.rhs)) {
    r.status = Status::Error;
    if (r.note.empty()) r.note = "non-finite value";
    return;
  }
  const double se = std::hypot(r.se_lhs, r.se_rhs);
  if (r.margin >= -std::max(v.k * se, v.tolerance)) {
    r.status = Status::Pass;
  } else if (v.allow_inconclusive && se > v.inconclusive_ratio * std::abs(r.rhs)) {
    r.status = Status::Inconclusive;
  } else {
    r.status = Status::Fail;
  }
}

InequalityReport error_report(std::string inequality, std::string kernel,
                              std::string function, const Point& point, double t,
                              const std::string& message, Status status) {
  InequalityReport r;
  r.inequality = std::move(inequality);
  r.kernel = std::move(kernel);
  r.function = std::move(function);
  r.point = point;
  r.t = t;
  r.lhs = r.rhs = r.margin = std::nan("");
  r.status = status;
  r.note = message;
  return r;
}

const std::vector<std::string>& report_columns() {
  static const std::vector<std::string> cols = {
      "job", "inequality", "kernel", "function", "point", "t", "lhs",
      "rhs", "se_lhs", "se_rhs", "margin", "status", "note"};
  return cols;
}

std::string format_real(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

void write_csv_header(std::ostream& os) {
  const auto& cols = report_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
  os << '\n';
}

void write_csv_row(std::ostream& os, const InequalityReport& r) {
  std::string point;
  for (Eigen::Index i = 0; i < r.point.size(); ++i) {
    if (i) point += ';';
    point += format_real(r.point(i));
  }
  os << csv_field(r.job) << ',' << csv_field(r.inequality) << ','
     << csv_field(r.kernel) << ',' << csv_field(r.function) << ',' << point << ','
     << format_real(r.t) << ',' << format_real(r.lhs) << ',' << format_real(r.rhs)
     << ',' << format_real(r.se_lhs) << ',' << format_real(r.se_rhs) << ','
     << format_real(r.margin) << ',' << to_string(r.status) << ','
     << csv_field(r.note) << '\n';
}

}  // namespace hypo
