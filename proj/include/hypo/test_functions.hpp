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
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hypo/kernel.hpp"

namespace hypo {

enum class RidgeShape { Constant, Linear, Exp, Sin };

/// f(z) = amp * phi(w.z + offset) + shift.
struct Ridge {
  RidgeShape shape = RidgeShape::Linear;
  Point w;
  double offset = 0.0;
  double amp = 1.0;
  double shift = 0.0;

  double phi(double u) const;
  double dphi(double u) const;
  double operator()(const Point& z) const { return amp * phi(w.dot(z) + offset) + shift; }
};

struct TestFunction {
  std::string id;
  std::function<double(const Point&)> eval;
  /// Euclidean gradient in the observed coordinates, when known exactly.
  std::function<Point(const Point&)> gradient;
  bool positive = false;
  bool bounded = true;
  std::optional<Ridge> ridge;

  double operator()(const Point& p) const { return eval(p); }
};

TestFunction ridge_function(const Ridge& r, std::string id);
TestFunction constant_function(double c, int dim);
TestFunction coordinate_function(int index, int dim);
TestFunction exp_linear(const Point& w, double offset = 0.0, double amp = 1.0);
TestFunction sin_ridge(const Point& w, double offset, double amp = 1.0, double shift = 0.0);
/// Smooth bump exp(1 - 1/(1 - v)), v = sum ((p_i - c_i)/s_i)^2, zero for v >= 1.
TestFunction bump(const Point& center, const Point& scales, std::string id);
/// a*f + b.
TestFunction affine(const TestFunction& f, double a, double b);
TestFunction one_plus(const TestFunction& f);

/// Ten off-center bumps on a space of dimension dim at scales 0.5, 1, 2.
std::vector<TestFunction> bump_family(int dim, int count = 10);
/// Bounded functions sin(c.p + b) with random c, b.
std::vector<TestFunction> random_sin_functions(int count, int dim, std::uint64_t seed, double scale = 1.0);
/// Named families: "constants", "coordinates", "exp-linear", "bumps",
/// "positive-bumps", "sin-ridges", "random-sin".
std::vector<TestFunction> function_family(const std::string& name, int dim, std::uint64_t seed = 1);
const std::vector<std::string>& function_family_names();

/// Closed-form moments of a ridge function under z ~ N(M z0 + shift, cov).
struct RidgeMoments {
  double pf = 0.0;
  double pf2 = 0.0;
  std::optional<double> pflogf;
  /// Euclidean gradient of z0 -> P_t f(z0).
  Point grad;
  /// Euclidean Laplacian of z0 -> P_t f(z0).
  double laplacian = 0.0;
  /// Mean and standard deviation of w.z + offset.
  double mu = 0.0;
  double s = 0.0;
  /// P_t |f'(u)|^p / |amp|^p, i.e. E|phi'(u)|^p.
  double abs_dphi_p(double p) const;
  RidgeShape shape = RidgeShape::Linear;
};

RidgeMoments ridge_moments(const Ridge& r, const GaussianLaw& law, const Point& z0);

}  // namespace hypo
