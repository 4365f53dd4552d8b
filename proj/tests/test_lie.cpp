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
#include "hypo/lie.hpp"
#include "hypo/rng.hpp"

using namespace hypo;
using Eigen::MatrixXd;
using Eigen::VectorXd;
using doctest::Approx;

namespace {

MatrixXd random_orthogonal(int n, RandomStream& r) {
  MatrixXd g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = r.normal();
  return Eigen::HouseholderQR<MatrixXd>(g).householderQ();
}

// Basis-free kappa and gamma: the largest eigenvalue of sum A_l^T A_l and a
// quarter of the smallest squared Frobenius norm of the A_l.
std::pair<double, double> kappa_gamma_oracle(const TransverseGroupSpec& s) {
  MatrixXd g = MatrixXd::Zero(2 * s.n, 2 * s.n);
  double fmin = std::numeric_limits<double>::infinity();
  for (const auto& a : s.A) {
    g += a.transpose() * a;
    fmin = std::min(fmin, a.squaredNorm());
  }
  return {Eigen::SelfAdjointEigenSolver<MatrixXd>(g).eigenvalues().maxCoeff(), fmin / 4};
}

}  // namespace

TEST_CASE("named specs validate") {
  for (const char* id : {"heisenberg:1", "heisenberg:3", "so3", "su2", "so4", "vandermonde:4:2"}) {
    INFO(id);
    const auto rep = validate_spec(make_transverse_spec(id));
    CHECK_MESSAGE(rep.ok(), rep.summary());
  }
}

TEST_CASE("curvature of the compact examples") {
  CHECK(constants(so3_spec()).rho == Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(constants(so4_spec()).rho - std::sqrt(2.0)) < 1e-10);
  CHECK(constants(su2_spec()).rho > 0.0);
  const auto h = constants(heisenberg_spec(1));
  CHECK(h.rho == Approx(0.0));
  CHECK(h.gamma == Approx(0.5));
  CHECK(h.kappa == Approx(1.0));
}

TEST_CASE("vandermonde ratio") {
  for (int n = 2; n <= 6; ++n) {
    for (int m = 1; m <= n; ++m) {
      const auto s = vandermonde_family(n, m);
      const auto c = constants(s);
      CHECK(c.kappa / c.gamma == Approx(2 * (std::pow(n, m) - 1) / (n * (n - 1.0))).epsilon(1e-12));
      const auto [k, g] = kappa_gamma_oracle(s);
      CHECK(c.kappa == Approx(k).epsilon(1e-10));
      CHECK(c.gamma == Approx(g).epsilon(1e-10));
    }
  }
}

TEST_CASE("block diagonalization round trip under conjugation") {
  RandomStream r(17, 0);
  for (int k = 0; k < 40; ++k) {
    const int n = 1 + k % 6, m = 1 + k % std::min(n, 3);
    MatrixXd lambda(n, m), mu = MatrixXd::Zero(n, m);
    for (int i = 0; i < n; ++i) {
      for (int l = 0; l < m; ++l) lambda(i, l) = r.normal();
      lambda(i, 0) = 0.2 + std::abs(lambda(i, 0));
      if (i % 2 == 0)
        for (int l = 0; l < m; ++l) mu(i, l) = r.normal();
    }
    const auto spec = conjugate(block_family("t", lambda, mu), random_orthogonal(2 * n, r));
    const auto bd = block_diagonalize(spec);
    CHECK(bd.residual < 1e-9);
    CHECK((bd.U * bd.U.transpose() - MatrixXd::Identity(2 * n, 2 * n)).cwiseAbs().maxCoeff() < 1e-10);
    // Row sums of squares are basis-free for distinct blocks; compare sorted.
    std::vector<double> want, got;
    for (int i = 0; i < n; ++i) {
      want.push_back(lambda.row(i).squaredNorm());
      got.push_back(bd.lambda.row(i).squaredNorm());
    }
    std::sort(want.begin(), want.end());
    std::sort(got.begin(), got.end());
    for (int i = 0; i < n; ++i) CHECK(got[std::size_t(i)] == Approx(want[std::size_t(i)]).epsilon(1e-9));
    const auto [kap, gam] = kappa_gamma_oracle(spec);
    const auto c = constants(spec);
    CHECK(c.kappa == Approx(kap).epsilon(1e-9));
    CHECK(c.gamma == Approx(gam).epsilon(1e-9));
    if (m == n) CHECK(c.kappa / c.gamma >= 2.0 - 1e-12);
  }
}

TEST_CASE("spec bracket is antisymmetric and satisfies Jacobi") {
  RandomStream r(3, 0);
  for (const char* id : {"so3", "su2", "so4", "heisenberg:2"}) {
    const auto s = make_transverse_spec(id);
    const int d = 2 * s.n + s.m;
    auto rnd = [&]() {
      VectorXd v(d);
      for (int i = 0; i < d; ++i) v(i) = r.normal();
      return v;
    };
    for (int k = 0; k < 10; ++k) {
      const VectorXd a = rnd(), b = rnd(), c = rnd();
      CHECK((spec_bracket(s, a, b) + spec_bracket(s, b, a)).norm() < 1e-12);
      const VectorXd jac = spec_bracket(s, a, spec_bracket(s, b, c)) + spec_bracket(s, b, spec_bracket(s, c, a)) +
                           spec_bracket(s, c, spec_bracket(s, a, b));
      CHECK(jac.norm() < 1e-10);
    }
  }
}

TEST_CASE("submersion onto a step-2 group") {
  const auto sub = build_submersion(heisenberg_spec(2));
  CHECK(sub.homomorphism());
  CHECK(sub.step2);
  const auto v = build_submersion(vandermonde_family(3, 2));
  CHECK(v.within_block_residual < 1e-12);
  CHECK(v.map_point(VectorXd::Zero(9)).norm() == 0.0);
}

TEST_CASE("so4 splits into two commuting su2 copies") {
  const auto s = so4_split();
  CHECK(s.bracket_residual < 1e-12);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK(commutator(s.U[std::size_t(i)], s.V[std::size_t(j)]).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((s.U[0] * s.U[1] - s.U[1] * s.U[0] - std::sqrt(2.0) * s.U[2]).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((s.V[1] * s.V[2] - s.V[2] * s.V[1] - std::sqrt(2.0) * s.V[0]).cwiseAbs().maxCoeff() < 1e-12);
  const auto e = su2_basis();
  for (int i = 0; i < 3; ++i) {
    const Eigen::Matrix4d tu = s.intertwiner_u * realify(e[std::size_t(i)]) * s.intertwiner_u.transpose();
    CHECK((tu - s.U[std::size_t(i)] / std::sqrt(2.0)).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("realify is an algebra map") {
  const auto e = su2_basis();
  const Eigen::Matrix2cd ab = e[0] * e[1];
  CHECK((realify(ab) - realify(e[0]) * realify(e[1])).cwiseAbs().maxCoeff() < 1e-14);
  CHECK(skew_residual(realify(e[2])) < 1e-15);
}

TEST_CASE("model space classification") {
  CHECK(classify_model_space(0.0).tag == ModelTag::Heisenberg);
  CHECK(classify_model_space(2.0).tag == ModelTag::SU2);
  CHECK(classify_model_space(-1.5).tag == ModelTag::SL2Cover);
  CHECK(classify_model_space(-1.5).alpha == 1.5);
}

TEST_CASE("transverse constants") {
  const auto h = transverse_constants(constants(heisenberg_spec(1)), 0.5, 1);
  CHECK(h.rp == Approx(5.0));
  CHECK(h.rls == Approx(10.0));
  CHECK(h.ly_a == Approx(4.0));
  CHECK(h.ly_b == Approx(32.0));
  ConstantsBundle neg;
  neg.rho = -1.0;
  neg.rho_minus = 1.0;
  neg.kappa = 1.0;
  neg.gamma = 0.5;
  const auto c = transverse_constants(neg, 2.0, 1);
  CHECK(c.rp == Approx(7.0 / 4));
  CHECK(c.ly_b == Approx(2.0 / 3 + 4 + 8));
  CHECK_THROWS_AS(transverse_constants(neg, 0.0, 1), InputError);
}

TEST_CASE("invalid specs are reported") {
  TransverseGroupSpec bad;
  bad.id = "bad";
  bad.n = 1;
  bad.m = 1;
  bad.A = {MatrixXd::Identity(2, 2)};
  CHECK_FALSE(validate_spec(bad).ok());
  CHECK_THROWS_AS(make_transverse_spec("vandermonde:2:3"), InputError);
  CHECK_THROWS_AS(make_transverse_spec("nope"), InputError);
}

TEST_CASE("comparison numerator for the vandermonde family") {
  const auto c = transverse_constants(constants(vandermonde_family(2, 2)), 1.0, 2);
  CHECK(c.cd_numerator == Approx(7.0));
  CHECK(c.numerator == Approx(5.0));
}
