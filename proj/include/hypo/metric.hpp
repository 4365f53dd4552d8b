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

#include <functional>
#include <string>
#include <vector>

#include "hypo/core.hpp"

namespace hypo {

using DistanceFn = std::function<double(const Point&, const Point&)>;

struct MetricSpace {
  std::string id;
  int dimension = 0;
  DistanceFn distance;
};

/// l2-product of metric spaces: d(x,y)^2 = sum_i d_i(x_i, y_i)^2.
class ProductMetricSpace {
 public:
  explicit ProductMetricSpace(std::vector<MetricSpace> components);

  int dimension() const { return dimension_; }
  const std::vector<MetricSpace>& components() const { return components_; }
  int offset(std::size_t i) const { return offsets_[i]; }

  /// Coordinates of component i inside a concatenated point.
  Point component(const Point& x, std::size_t i) const;
  double distance(const Point& x, const Point& y) const;
  /// The product as a plain metric space handle.
  MetricSpace as_space() const;

 private:
  std::vector<MetricSpace> components_;
  std::vector<int> offsets_;
  int dimension_ = 0;
};

double product_distance(const ProductMetricSpace& space, const Point& x,
                        const Point& y);

MetricSpace euclidean_space(int d);

/// sqrt(4|dx|^2 + (12/t)<dx,dy> + (12/t^2)|dy|^2); points are (x_1..x_d, y_1..y_d).
double kolmogorov_control_distance(double t, const Point& p1, const Point& p2);
MetricSpace kolmogorov_control_space(int d, double t);

/// Heisenberg group H^3 in exponential coordinates (x1, x2, y) with
/// X1 = d/dx1 - (x2/2) d/dy, X2 = d/dx2 + (x1/2) d/dy.
Point heisenberg_multiply(const Point& a, const Point& b);
Point heisenberg_inverse(const Point& a);

struct CCSolverOptions {
  double tolerance = 1e-8;
  int max_iterations = 200;
};

/// Carnot-Caratheodory distance from the identity to (x1, x2, y).
double heisenberg_cc_norm(const Point& p, const CCSolverOptions& opts = {});
double heisenberg_cc_distance(const Point& p1, const Point& p2,
                              const CCSolverOptions& opts = {});
MetricSpace heisenberg3_space();

/// |joint^2 - sum components^2| <= tolerance.
bool product_cc_check(const std::vector<double>& components, double joint,
                      double tolerance = 1e-9);

/// Parses "euclidean:d", "heisenberg3", "kolmogorov-control:d:t",
/// "product:[id,id,...]".
MetricSpace make_space(const std::string& id);

}  // namespace hypo
