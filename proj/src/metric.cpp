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

#include "hypo/metric.hpp"

#include <cmath>
#include <cstdio>
#include <memory>
#include <numbers>

namespace hypo {

ProductMetricSpace::ProductMetricSpace(std::vector<MetricSpace> components)
    : components_(std::move(components)) {
  require(!components_.empty(), "product space needs at least one component");
  for (const auto& c : components_) {
    offsets_.push_back(dimension_);
    dimension_ += c.dimension;
  }
}

Point ProductMetricSpace::component(const Point& x, std::size_t i) const {
  return x.segment(offsets_[i], components_[i].dimension);
}

double ProductMetricSpace::distance(const Point& x, const Point& y) const {
  require(x.size() == dimension_ && y.size() == dimension_,
          "point dimension does not match product space");
  double sum = 0.0;
  for (std::size_t i = 0; i < components_.size(); ++i) {
    const double di = components_[i].distance(component(x, i), component(y, i));
    sum += di * di;
  }
  return std::sqrt(sum);
}

MetricSpace ProductMetricSpace::as_space() const {
  std::string id = "product:[";
  for (std::size_t i = 0; i < components_.size(); ++i) {
    if (i) id += ",";
    id += components_[i].id;
  }
  id += "]";
  auto self = std::make_shared<ProductMetricSpace>(*this);
  return {id, dimension_,
          [self](const Point& x, const Point& y) { return self->distance(x, y); }};
}

double product_distance(const ProductMetricSpace& space, const Point& x,
                        const Point& y) {
  return space.distance(x, y);
}

MetricSpace euclidean_space(int d) {
  require(d > 0, "euclidean dimension must be positive");
  return {"euclidean:" + std::to_string(d), d, [d](const Point& x, const Point& y) {
            require(x.size() == d && y.size() == d, "point dimension mismatch");
            return (x - y).norm();
          }};
}

double kolmogorov_control_distance(double t, const Point& p1, const Point& p2) {
  require(t > 0.0, "control distance needs t > 0");
  require(p1.size() == p2.size() && p1.size() % 2 == 0,
          "control distance needs points in R^d x R^d");
  const Eigen::Index d = p1.size() / 2;
  const Point dx = p1.head(d) - p2.head(d);
  const Point dy = p1.tail(d) - p2.tail(d);
  // Sum of squares form: 4|dx + (3/(2t)) dy|^2 + (3/t^2)|dy|^2.
  const double q = (4.0 * (dx + 1.5 / t * dy).squaredNorm()) + 3.0 / (t * t) * dy.squaredNorm();
  return std::sqrt(q);
}

MetricSpace kolmogorov_control_space(int d, double t) {
  require(d > 0, "kolmogorov dimension must be positive");
  require(t > 0.0, "control distance needs t > 0");
  char buf[64];
  std::snprintf(buf, sizeof buf, "kolmogorov-control:%d:%g", d, t);
  return {buf, 2 * d, [t](const Point& a, const Point& b) {
            return kolmogorov_control_distance(t, a, b);
          }};
}

Point heisenberg_multiply(const Point& a, const Point& b) {
  Point c(3);
  c << a(0) + b(0), a(1) + b(1), a(2) + b(2) + 0.5 * (a(0) * b(1) - a(1) * b(0));
  return c;
}

Point heisenberg_inverse(const Point& a) { return -a; }

namespace {

// Enclosed area per squared chord for a circular arc of angle phi:
// (phi - sin phi) / (8 sin^2(phi/2)).
double area_ratio(double phi) {
  if (phi < 1e-3) {
    const double p2 = phi * phi;
    const double num = phi * p2 / 6.0 * (1.0 - p2 / 20.0 + p2 * p2 / 840.0);
    const double s = std::sin(0.5 * phi);
    return num / (8.0 * s * s);
  }
  const double s = std::sin(0.5 * phi);
  return (phi - std::sin(phi)) / (8.0 * s * s);
}

double arc_over_chord(double phi) {
  if (phi < 1e-8) return 1.0;
  return 0.5 * phi / std::sin(0.5 * phi);
}

}  // namespace

double heisenberg_cc_norm(const Point& p, const CCSolverOptions& opts) {
  require(p.size() == 3, "heisenberg points have 3 coordinates");
  const double r = std::hypot(p(0), p(1));
  const double a = std::abs(p(2));
  if (a == 0.0) return r;
  if (r == 0.0 || a / (r * r) > 1e16) return std::sqrt(4.0 * std::numbers::pi * a);
  const double target = a / (r * r);
  // Geodesics project to circular arcs; bisect for the arc angle in (0, 2pi).
  double lo = 0.0;
  double hi = 2.0 * std::numbers::pi;
  double phi = 0.5 * (lo + hi);
  double residual = 0.0;
  for (int it = 0; it < opts.max_iterations; ++it) {
    phi = 0.5 * (lo + hi);
    residual = area_ratio(phi) - target;
    if (residual > 0.0) hi = phi; else lo = phi;
    if (hi - lo <= 1e-15 * hi) break;
  }
  const double rel = std::abs(area_ratio(phi) - target) / target;
  if (!(rel <= opts.tolerance) && hi - lo > 1e-13) {
    throw NumericError("heisenberg CC root-find did not converge", rel);
  }
  return r * arc_over_chord(phi);
}

double heisenberg_cc_distance(const Point& p1, const Point& p2,
                              const CCSolverOptions& opts) {
  return heisenberg_cc_norm(heisenberg_multiply(heisenberg_inverse(p1), p2), opts);
}

MetricSpace heisenberg3_space() {
  return {"heisenberg3", 3, [](const Point& a, const Point& b) {
            return heisenberg_cc_distance(a, b);
          }};
}

bool product_cc_check(const std::vector<double>& components, double joint,
                      double tolerance) {
  double sum = 0.0;
  for (double c : components) sum += c * c;
  return std::abs(joint * joint - sum) <= tolerance;
}

namespace {

std::vector<std::string> split_top_level(const std::string& s) {
  std::vector<std::string> parts;
  int depth = 0;
  std::string cur;
  for (char c : s) {
    if (c == '[') ++depth;
    if (c == ']') --depth;
    if (c == ',' && depth == 0) {
      parts.push_back(cur);
      cur.clear();
    } else if (c != ' ') {
      cur += c;
    }
  }
  if (!cur.empty()) parts.push_back(cur);
  return parts;
}

std::vector<std::string> split_colon(const std::string& s) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  for (std::size_t pos; (pos = s.find(':', start)) != std::string::npos; start = pos + 1) {
    parts.push_back(s.substr(start, pos - start));
  }
  parts.push_back(s.substr(start));
  return parts;
}

int parse_int(const std::string& s, const std::string& ctx) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw InputError("bad integer '" + s + "' in " + ctx);
}

double parse_real(const std::string& s, const std::string& ctx) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw InputError("bad number '" + s + "' in " + ctx);
}

}  // namespace

MetricSpace make_space(const std::string& id) {
  if (id == "heisenberg3") return heisenberg3_space();
  if (id.rfind("product:[", 0) == 0 && id.back() == ']') {
    std::vector<MetricSpace> comps;
    for (const auto& part : split_top_level(id.substr(9, id.size() - 10))) {
      comps.push_back(make_space(part));
    }
    return ProductMetricSpace(std::move(comps)).as_space();
  }
  const auto parts = split_colon(id);
  if (parts[0] == "euclidean" && parts.size() == 2) {
    return euclidean_space(parse_int(parts[1], id));
  }
  if (parts[0] == "kolmogorov-control" && parts.size() == 3) {
    return kolmogorov_control_space(parse_int(parts[1], id), parse_real(parts[2], id));
  }
  throw InputError("unknown space id '" + id + "'");
}

}  // namespace hypo
