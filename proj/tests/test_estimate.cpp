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

#include <cmath>

#include "doctest.h"
#include "hypo/estimate.hpp"
#include "hypo/kernel.hpp"
#include "hypo/rng.hpp"
#include "hypo/test_functions.hpp"

using namespace hypo;
using Eigen::MatrixXd;
using Eigen::VectorXd;
using doctest::Approx;

namespace {

Point fd_gradient(const TestFunction& f, const Point& p, double h = 1e-6) {
  Point g(p.size());
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    Point a = p, b = p;
    a(i) += h;
    b(i) -= h;
    g(i) = (f(a) - f(b)) / (2 * h);
  }
  return g;
}

}  // namespace

TEST_CASE("gauss-hermite moments") {
  const auto& q = gauss_hermite(32);
  double m0 = 0, m2 = 0, m4 = 0, m6 = 0;
  for (std::size_t i = 0; i < q.nodes.size(); ++i) {
    const double x = q.nodes[i];
    m0 += q.weights[i];
    m2 += q.weights[i] * x * x;
    m4 += q.weights[i] * std::pow(x, 4);
    m6 += q.weights[i] * std::pow(x, 6);
  }
  CHECK(m0 == Approx(1.0).epsilon(1e-13));
  CHECK(m2 == Approx(1.0).epsilon(1e-12));
  CHECK(m4 == Approx(3.0).epsilon(1e-12));
  CHECK(m6 == Approx(15.0).epsilon(1e-12));
  CHECK(gaussian_expectation([](double x) { return std::exp(x); }, 0.3, 0.7) ==
        Approx(std::exp(0.3 + 0.245)).epsilon(1e-12));
  CHECK(gaussian_expectation([](double x) { return std::cos(x); }, 0.0, 1.5) ==
        Approx(std::exp(-1.125)).epsilon(1e-12));
}

TEST_CASE("delta-method standard error") {
  Estimate e;
  e.mean = VectorXd::Constant(1, 2.0);
  e.cov = MatrixXd::Constant(1, 1, 0.04);
  e.n = 100;
  CHECK(e.stderr_at(0) == Approx(0.02));
  // d/dm m^2 = 4 at m = 2.
  CHECK(e.stderr_of([](const VectorXd& m) { return m(0) * m(0); }) == Approx(0.08).epsilon(1e-3));
  const auto x = Estimate::exact_value(VectorXd::Constant(2, 1.0));
  CHECK(x.exact);
  CHECK(x.stderr_of([](const VectorXd& m) { return m.sum(); }) == 0.0);
}

TEST_CASE("simulation is reproducible and shares paths across starts") {
  const auto k = make_kernel("kinetic:quad1", 1e-2);
  SimulationRequest req;
  req.starts = {Point{{0.0, 0.0}}, Point{{0.1, 0.0}}};
  req.times = {0.5, 1.0};
  req.groups = {4};
  req.paths = 500;
  req.key = 99;
  auto obs = [](const std::vector<Point>& ends, double* out) {
    for (int i = 0; i < 4; ++i) out[i] = ends[std::size_t(i)](0);
  };
  const auto a = simulate(*k, req, obs), b = simulate(*k, req, obs);
  CHECK(a[0].mean == b[0].mean);
  CHECK(a[0].cov == b[0].cov);
  // Common random numbers: the two starts differ by the deterministic flow only.
  const double diff_se = std::sqrt(a[0].cov(3, 3) + a[0].cov(2, 2) - 2 * a[0].cov(2, 3));
  CHECK(diff_se < 0.1 * std::sqrt(a[0].cov(2, 2)));
}

TEST_CASE("left-invariant simulation translates one increment") {
  const auto k = heisenberg_kernel(1e-2);
  const Point g{{0.5, -0.3, 0.2}};
  SimulationRequest req;
  req.starts = {k->identity(), g};
  req.times = {0.4};
  req.groups = {6};
  req.paths = 50;
  req.key = 5;
  std::vector<double> first;
  simulate(*k, req, [&](const std::vector<Point>& ends, double* out) {
    const Point expect = k->multiply(g, ends[0]);
    CHECK((ends[1] - expect).norm() < 1e-14);
    for (int i = 0; i < 3; ++i) out[i] = ends[0](i), out[3 + i] = ends[1](i);
  });
}

TEST_CASE("sliced W2 of shifted clouds") {
  RandomStream r(3, 0);
  std::vector<Point> a, b;
  for (int i = 0; i < 2000; ++i) {
    Point p{{r.normal(), r.normal()}};
    a.push_back(p);
    b.push_back(p + Point{{1.0, 0.0}});
  }
  // Each direction sees a shift of cos(theta); the mean of cos^2 is 1/2.
  CHECK(sliced_wasserstein2(a, b, 400, 1) == Approx(std::sqrt(0.5)).epsilon(0.05));
  CHECK(sliced_wasserstein2(a, a, 10, 1) == 0.0);
}

TEST_CASE("test function gradients") {
  RandomStream r(4, 0);
  for (const auto& name : function_family_names()) {
    for (const auto& f : function_family(name, 3)) {
      INFO(f.id);
      for (int k = 0; k < 3; ++k) {
        const Point p{{0.5 * r.normal(), 0.5 * r.normal(), 0.5 * r.normal()}};
        if (f.positive) CHECK(f(p) > 0.0);
        if (f.gradient) CHECK((f.gradient(p) - fd_gradient(f, p)).norm() < 1e-6 * (1 + f.gradient(p).norm()));
      }
    }
  }
  CHECK(function_family("random-sin", 16).size() == 20);
  CHECK(function_family("bumps", 3).size() == 10);
  CHECK_THROWS_AS(function_family("nope", 2), InputError);
}

TEST_CASE("bump is supported in its box") {
  const auto b = bump(Point::Zero(2), Point::Constant(2, 1.0), "b");
  CHECK(b(Point::Zero(2)) == Approx(1.0));
  CHECK(b(Point{{2.0, 0.0}}) == 0.0);
  CHECK(b.gradient(Point{{2.0, 0.0}}).norm() == 0.0);
}

TEST_CASE("ridge moments against quadrature") {
  KolmogorovSpec spec{VectorXd::Constant(1, 0.8)};
  const auto law = kolmogorov_law(spec, 0.7);
  const Point z0{{0.2, -0.4}}, w{{0.6, -0.3}};
  const VectorXd mean = law.M * z0;
  const double mu = w.dot(mean) + 0.1, s = std::sqrt(w.dot(law.cov * w));
  for (RidgeShape shape : {RidgeShape::Linear, RidgeShape::Exp, RidgeShape::Sin}) {
    const Ridge rg{shape, w, 0.1, 1.3, shape == RidgeShape::Linear ? 0.0 : 2.0};
    const auto m = ridge_moments(rg, law, z0);
    auto g = [&](double u) { return rg.amp * rg.phi(u) + rg.shift; };
    CHECK(m.mu == Approx(mu));
    CHECK(m.s == Approx(s));
    CHECK(m.pf == Approx(gaussian_expectation(g, mu, s, 96)).epsilon(1e-12));
    CHECK(m.pf2 == Approx(gaussian_expectation([&](double u) { return g(u) * g(u); }, mu, s, 96)).epsilon(1e-12));
    if (m.pflogf && shape != RidgeShape::Linear)
      CHECK(*m.pflogf ==
            Approx(gaussian_expectation([&](double u) { return g(u) * std::log(g(u)); }, mu, s, 96)).epsilon(1e-10));
    // grad of z0 -> E g(w.(M z0 + noise)) is E g'(u) M^T w.
    const double eg = gaussian_expectation([&](double u) { return rg.amp * rg.dphi(u); }, mu, s, 96);
    CHECK((m.grad - eg * law.M.transpose() * w).norm() < 1e-10);
  }
}
