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
#include "hypo/inequality.hpp"
#include "hypo/kernel.hpp"
#include "hypo/lie.hpp"
#include "hypo/rng.hpp"
#include "hypo/test_functions.hpp"

using namespace hypo;
using Eigen::MatrixXd;
using Eigen::VectorXd;
using doctest::Approx;

namespace {

CheckContext context(const std::string& kernel, long paths, double dt = 1e-3) {
  CheckContext c;
  c.kernel = make_kernel(kernel, dt);
  c.paths = paths;
  c.key = 77;
  c.job = "test";
  return c;
}

// Same function with the ridge structure hidden, so the checks must simulate.
TestFunction opaque(TestFunction f) {
  f.ridge.reset();
  f.id += "-mc";
  return f;
}

bool all_status(const std::vector<InequalityReport>& rows, Status s) {
  for (const auto& r : rows)
    if (r.status != s) return false;
  return !rows.empty();
}

// Exp-linear moments under the Kolmogorov law, by hand.
struct ExpOracle {
  double pf, pf2;
  VectorXd grad;
};

ExpOracle exp_oracle(const KolmogorovSpec& spec, const Point& w, const Point& z0, double t) {
  const auto law = kolmogorov_law(spec, t);
  const double m = w.dot(law.M * z0), v = w.dot(law.cov * w);
  ExpOracle o;
  o.pf = std::exp(m + v / 2);
  o.pf2 = std::exp(2 * m + 2 * v);
  o.grad = law.M.transpose() * w * o.pf;
  return o;
}

}  // namespace

TEST_CASE("kolmogorov reverse Poincare and log-Sobolev against hand algebra") {
  const KolmogorovSpec spec{VectorXd((VectorXd(2) << 0.5, 2.0).finished())};
  auto ctx = context("kolmogorov:0.5,2", 1);
  const Point w{{0.3, -0.2, 0.1, 0.4}}, z0{{0.1, 0.2, -0.3, 0.5}};
  const std::vector<double> times{0.1, 1.0, 5.0};
  const std::vector<TestFunction> fs{exp_linear(w)};
  const auto C = [](double t) { return 1.0 / (0.25 * t); };
  const auto Q = [](double t) { return kolmogorov_twisted_form(2, t); };
  const auto rp = check_reverse_poincare(ctx, fs, z0, times, C, Q);
  const auto rls = check_reverse_log_sobolev(ctx, fs, z0, times, C, Q);
  REQUIRE(rp.size() == 3);
  REQUIRE(rls.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    const double t = times[i];
    const auto o = exp_oracle(spec, w, z0, t);
    const double gamma = o.grad.dot(kolmogorov_twisted_form(2, t) * o.grad);
    CHECK(rp[i].lhs == Approx(gamma).epsilon(1e-10));
    CHECK(rp[i].rhs == Approx(C(t) * (o.pf2 - o.pf * o.pf)).epsilon(1e-10));
    CHECK(rp[i].status == Status::Pass);
    CHECK(rp[i].note == "exact");
    const double ent = o.pf * (std::log(o.pf) + w.dot(kolmogorov_law(spec, t).cov * w) / 2) - o.pf * std::log(o.pf);
    CHECK(rls[i].lhs == Approx(gamma / o.pf).epsilon(1e-10));
    CHECK(rls[i].rhs == Approx(C(t) * ent).epsilon(1e-8));
    CHECK(rls[i].status == Status::Pass);
  }
}

TEST_CASE("kolmogorov gradient bound is tight on exponentials") {
  auto ctx = context("kolmogorov:0.7", 1);
  const std::vector<double> times{0.1, 1.0, 5.0};
  const auto one = [](double) { return 1.0; };
  const auto lhs = [](double) { return kolmogorov_x_map(1); };
  const auto rhs = [](double t) { return kolmogorov_shear_map(1, t, 1.0); };
  const auto rows = check_gradient_bound(ctx, {exp_linear(Point{{0.4, -0.3}})}, Point{{0.2, 0.1}}, times, 1.0, one,
                                         lhs, rhs);
  for (const auto& r : rows) {
    CHECK(r.status == Status::Pass);
    CHECK(r.lhs == Approx(r.rhs).epsilon(1e-10));
  }
  // With half the shear the bound fails for y-heavy directions.
  const auto half = [](double t) { return kolmogorov_shear_map(1, t, 0.5); };
  const auto bad = check_gradient_bound(ctx, {exp_linear(Point{{0.0, 1.0}})}, Point{{0.0, 0.0}}, {1.0}, 1.0, one,
                                        lhs, half);
  CHECK(bad[0].status == Status::Fail);
}

TEST_CASE("exact and simulated routes agree") {
  auto ctx = context("kolmogorov:1", 100000);
  const auto f = exp_linear(Point{{0.3, -0.2}}, 0.1);
  const std::vector<double> times{0.5, 1.0};
  const auto C = [](double t) { return 1.0 / t; };
  const auto Q = [](double t) { return kolmogorov_twisted_form(1, t); };
  const auto exact = check_reverse_poincare(ctx, {f}, Point{{0.2, -0.1}}, times, C, Q);
  const auto mc = check_reverse_poincare(ctx, {opaque(f)}, Point{{0.2, -0.1}}, times, C, Q);
  for (std::size_t i = 0; i < times.size(); ++i) {
    CHECK(mc[i].note.rfind("mc", 0) == 0);
    CHECK(std::abs(mc[i].lhs - exact[i].lhs) < 4 * mc[i].se_lhs + 1e-3 * exact[i].lhs);
    CHECK(std::abs(mc[i].rhs - exact[i].rhs) < 4 * mc[i].se_rhs + 1e-3 * exact[i].rhs);
  }
}

TEST_CASE("heisenberg reverse Poincare at 1/t and a broken constant") {
  auto ctx = context("heisenberg3", 20000);
  const auto fs = bump_family(3, 4);
  const std::vector<double> times{0.25, 1.0};
  const auto good = check_reverse_poincare(ctx, fs, Point::Zero(3), times, [](double t) { return 1.0 / t; });
  CHECK(all_status(good, Status::Pass));
  // P_t x_1 has unit gradient and variance 2t, so 1/t holds with room and 0.1/t fails.
  const std::vector<TestFunction> xs{coordinate_function(0, 3), coordinate_function(1, 3)};
  const auto ok = check_reverse_poincare(ctx, xs, Point::Zero(3), times, [](double t) { return 1.0 / t; });
  CHECK(all_status(ok, Status::Pass));
  const auto bad = check_reverse_poincare(ctx, xs, Point::Zero(3), times, [](double t) { return 0.1 / t; });
  CHECK(all_status(bad, Status::Fail));
}

TEST_CASE("li-yau on the heisenberg group") {
  auto ctx = context("heisenberg3", 20000);
  const auto k = carnot_constants(1, 0.5);
  CHECK(k.rp == Approx(2.0));
  CHECK(k.rls == Approx(10.0));
  CHECK(k.ly_a == 4.0);
  CHECK(k.ly_b == Approx(32.0));
  std::vector<TestFunction> fs;
  for (const auto& b : bump_family(3, 3)) fs.push_back(one_plus(b));
  const auto rows = check_li_yau(ctx, fs, Point::Zero(3), {0.5},
                                 [](double t) { return carnot_constants(1, t).ly_a; },
                                 [](double t) { return carnot_constants(1, t).ly_b; });
  CHECK(all_status(rows, Status::Pass));
  auto kctx = context("kolmogorov:1", 100);
  const auto un = check_li_yau(kctx, {exp_linear(Point{{0.1, 0.1}})}, Point::Zero(2), {1.0},
                               [](double) { return 1.0; }, [](double) { return 1.0; });
  CHECK(all_status(un, Status::Unsupported));
}

TEST_CASE("wang harnack and parabolic harnack on kolmogorov") {
  auto ctx = context("kolmogorov:1", 1);
  const Point x{{0.0, 0.0}}, y{{0.5, -0.3}};
  const auto fs = function_family("exp-linear", 2);
  for (double t : {0.5, 2.0}) {
    const double d = kolmogorov_control_distance(t, x, y);
    const auto wh = check_wang_harnack(ctx, fs, x, y, {t}, 2.0, [](double s) { return 1.0 / s; }, d);
    CHECK(all_status(wh, Status::Pass));
  }
  auto hctx = context("heisenberg3", 5000);
  const Point hx = Point::Zero(3), hy{{0.2, 0.1, 0.05}};
  std::vector<TestFunction> pos;
  for (const auto& b : bump_family(3, 3)) pos.push_back(one_plus(b));
  const auto ph = check_parabolic_harnack(hctx, pos, hx, hy, 0.5, 1.0, 1, heisenberg_cc_distance(hx, hy));
  REQUIRE(ph.size() == 6);
  for (const auto& r : ph)
    if (!r.informational) CHECK(r.status == Status::Pass);
}

TEST_CASE("wasserstein contraction of the heat kernel is an isometry") {
  auto ctx = context("euclidean:2", 1);
  const Point x{{0.0, 0.0}}, y{{0.3, 0.4}};
  const auto r = check_wasserstein_contraction(ctx, x, y, 1.0, 2.0, 1.0, {128, 5});
  CHECK(r.lhs == Approx(0.5).epsilon(1e-9));
  CHECK(r.rhs == Approx(0.5));
  CHECK(r.status == Status::Pass);
}

TEST_CASE("hellinger contraction against the gaussian formula") {
  for (double sigma : {0.5, 2.0}) {
    for (double t : {0.1, 5.0}) {
      const KolmogorovSpec spec{VectorXd::Constant(1, sigma)};
      const Point x{{0.0, 0.0}}, y{{0.3, -0.2}};
      const auto r = check_hellinger_contraction(spec, x, y, t);
      const double d = kolmogorov_control_distance(t, x, y);
      const double mahal = d * d / (2 * t * sigma * sigma);
      CHECK(r.lhs == Approx(2 * (1 - std::exp(-mahal / 8))).epsilon(1e-10));
      CHECK(r.rhs == Approx(d * d / (4 * sigma * sigma * t)).epsilon(1e-12));
      CHECK(r.status == Status::Pass);
    }
  }
}

TEST_CASE("intertwining of a heisenberg product onto a carnot group") {
  auto ctx = context("carnot-from-heisenberg:heisenberg:2", 20000, 1e-2);
  const auto direct = make_kernel("carnot:heisenberg:2", 1e-2);
  const auto fs = function_family("random-sin", direct->observed_dimension());
  const auto same = check_intertwining(ctx, direct, fs, ctx.kernel->identity(), direct->identity(), 0.3);
  int passes = 0;
  for (const auto& r : same) passes += r.status == Status::Pass;
  CHECK(passes >= int(fs.size()) - 1);
  Point shifted = direct->identity();
  shifted(0) = 1.0;
  const auto moved = check_intertwining(ctx, direct, fs, ctx.kernel->identity(), shifted, 0.3);
  int fails = 0;
  for (const auto& r : moved) fails += r.status == Status::Fail;
  CHECK(fails > 5);
}

TEST_CASE("kinetic constant is finite and holds on fresh functions") {
  KineticFPSpec spec;
  spec.potentials = {quadratic_potential(1.0)};
  std::vector<double> grid;
  for (int i = 0; i < 50; ++i) grid.push_back(0.05 * std::pow(100.0, i / 49.0));
  const double c = fit_kinetic_constant(spec, grid);
  CHECK(std::isfinite(c));
  CHECK(c > 0.0);
  for (double t : grid) CHECK(kinetic_rpi_ratio(spec, t) <= c * (1 + 1e-12));
  RandomStream r(1, 0);
  std::vector<TestFunction> fs;
  for (int k = 0; k < 5; ++k) fs.push_back(sin_ridge(Point{{r.normal(), r.normal()}}, r.normal()));
  const auto rows = check_kinetic_rpi(spec, fs, Point{{0.1, -0.2}}, {0.05, 0.5, 5.0}, c);
  CHECK(all_status(rows, Status::Pass));
}

TEST_CASE("horizontal gradients") {
  const auto k = heisenberg_kernel(1e-3);
  const Point p{{0.4, -1.2, 0.3}};
  const auto f = coordinate_function(2, 3);
  const Point g = horizontal_gradient(*k, f, p);
  CHECK(g(0) == Approx(-0.5 * p(1)));
  CHECK(g(1) == Approx(0.5 * p(0)));
  TestFunction wrong = f;
  wrong.gradient = [](const Point&) { return Point{{1.0, 1.0, 1.0}}; };
  CHECK_THROWS_AS(horizontal_gradient(*k, wrong, p), ConsistencyError);
}

TEST_CASE("heisenberg wang harnack and carnot log-Sobolev at 5/t") {
  auto ctx = context("heisenberg3", 20000);
  std::vector<TestFunction> pos;
  for (const auto& b : bump_family(3, 4)) pos.push_back(one_plus(b));
  const Point x = Point::Zero(3), y{{0.3, 0.0, 0.0}};
  const double d = heisenberg_cc_distance(x, y);
  CHECK(d == Approx(0.3).epsilon(1e-9));
  const auto wh = check_wang_harnack(ctx, pos, x, y, {0.5, 1.0}, 2.0, [](double t) { return 5.0 / t; }, d);
  CHECK(all_status(wh, Status::Pass));
  auto g = context("carnot:heisenberg:2", 20000);
  std::vector<TestFunction> pos5;
  for (const auto& b : bump_family(5, 4)) pos5.push_back(one_plus(b));
  const auto rls = check_reverse_log_sobolev(g, pos5, g.kernel->identity(), {0.5}, [](double t) { return 5.0 / t; });
  CHECK(all_status(rls, Status::Pass));
}
