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

#include "hypo/lie.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "hypo/rng.hpp"

namespace hypo {

using Eigen::MatrixXd;
using Eigen::VectorXd;

Eigen::Matrix2d symplectic_block() {
  Eigen::Matrix2d j;
  j << 0, 1, -1, 0;
  return j;
}

bool ValidationReport::ok() const {
  return std::all_of(conditions.begin(), conditions.end(),
                     [](const ConditionResult& c) { return c.pass; });
}

std::string ValidationReport::summary() const {
  std::ostringstream os;
  for (const auto& c : conditions) {
    os << c.name << ":" << (c.pass ? "pass" : "fail") << "(" << c.residual << ")";
    if (!c.detail.empty()) os << " " << c.detail;
    os << "; ";
  }
  return os.str();
}

namespace {

std::vector<MatrixXd> r_or_zero(const TransverseGroupSpec& s) {
  if (!s.R.empty()) return s.R;
  return std::vector<MatrixXd>(s.m, MatrixXd::Zero(2 * s.n, 2 * s.n));
}

int numeric_rank(const MatrixXd& m, double rel = 1e-10) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<MatrixXd> svd(m);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  int r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > rel * s(0)) ++r;
  return r;
}

double family_scale(const TransverseGroupSpec& s) {
  double sc = 0.0;
  for (const auto& a : s.A) sc = std::max(sc, a.cwiseAbs().maxCoeff());
  for (const auto& r : s.R) sc = std::max(sc, r.cwiseAbs().maxCoeff());
  return 1.0 + sc;
}

}  // namespace

ValidationReport validate_spec(const TransverseGroupSpec& spec) {
  ValidationReport rep;
  const int dim = 2 * spec.n;
  ConditionResult shape{"shape", true, 0.0, ""};
  if (spec.n < 1 || spec.m < 1 || spec.m > spec.n) {
    shape.pass = false;
    shape.detail = "need n >= 1 and 1 <= m <= n";
  }
  if (int(spec.A.size()) != spec.m || (!spec.R.empty() && int(spec.R.size()) != spec.m)) {
    shape.pass = false;
    shape.detail = "need m matrices in each family";
  }
  for (const auto* fam : {&spec.A, &spec.R})
    for (const auto& a : *fam)
      if (a.rows() != dim || a.cols() != dim) {
        shape.pass = false;
        shape.detail = "matrices must be 2n x 2n";
      }
  rep.conditions.push_back(shape);
  if (!shape.pass) return rep;

  const auto R = r_or_zero(spec);
  const double scale = family_scale(spec);

  ConditionResult a{"A", true, 0.0, "skew-symmetry"};
  for (const auto* fam : {&spec.A, &R})
    for (const auto& m : *fam) a.residual = std::max(a.residual, skew_residual(m));
  a.pass = a.residual <= 1e-12 * scale;
  rep.conditions.push_back(a);

  ConditionResult b{"B", true, 0.0, "linear independence of A_l"};
  MatrixXd stacked(dim * dim, spec.m);
  for (int l = 0; l < spec.m; ++l)
    stacked.col(l) = Eigen::Map<const VectorXd>(spec.A[l].data(), dim * dim);
  const int rank = numeric_rank(stacked);
  b.pass = rank == spec.m;
  {
    Eigen::JacobiSVD<MatrixXd> svd(stacked);
    const auto& s = svd.singularValues();
    b.residual = s(0) > 0 ? s(s.size() - 1) / s(0) : 0.0;
  }
  b.detail = "rank " + std::to_string(rank) + " of " + std::to_string(spec.m);
  rep.conditions.push_back(b);

  ConditionResult c{"C", true, 0.0, "pairwise commutation"};
  for (int l = 0; l < spec.m; ++l) {
    for (int k = 0; k < spec.m; ++k) {
      c.residual = std::max(c.residual, commutator(spec.A[l], spec.A[k]).cwiseAbs().maxCoeff());
      c.residual = std::max(c.residual, commutator(R[l], R[k]).cwiseAbs().maxCoeff());
      c.residual = std::max(c.residual, (spec.A[l] * R[k] - R[k] * spec.A[l]).cwiseAbs().maxCoeff());
    }
  }
  c.pass = c.residual <= 1e-10 * scale * scale;
  rep.conditions.push_back(c);
  return rep;
}

namespace {

// Orthonormal real basis of ker S, paired into consecutive columns.
MatrixXd real_kernel(const MatrixXd& s, double tol) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(s.transpose() * s);
  std::vector<int> idx;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
    if (es.eigenvalues()(i) <= tol * tol) idx.push_back(int(i));
  MatrixXd k(s.rows(), Eigen::Index(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) k.col(Eigen::Index(i)) = es.eigenvectors().col(idx[i]);
  return k;
}

MatrixXd block_matrix(const VectorXd& coeffs, const Eigen::Matrix2d& unit) {
  const Eigen::Index n = coeffs.size();
  MatrixXd d = MatrixXd::Zero(2 * n, 2 * n);
  for (Eigen::Index i = 0; i < n; ++i) d.block<2, 2>(2 * i, 2 * i) = coeffs(i) * unit;
  return d;
}

}  // namespace

BlockDiagonalization block_diagonalize(const TransverseGroupSpec& spec, std::uint64_t seed,
                                       int max_retries) {
  const auto rep = validate_spec(spec);
  require(rep.ok(), "invalid transverse spec: " + rep.summary());
  const int n = spec.n, m = spec.m, dim = 2 * n;
  const auto R = r_or_zero(spec);
  const double scale = family_scale(spec);
  const Eigen::Matrix2d J = symplectic_block();

  double best_residual = std::numeric_limits<double>::infinity();
  for (int attempt = 0; attempt <= max_retries; ++attempt) {
    RandomStream rng(RandomStream::derive_key(seed, "block-diagonalize"), std::uint64_t(attempt));
    MatrixXd s = MatrixXd::Zero(dim, dim);
    for (int l = 0; l < m; ++l) s += rng.normal() * spec.A[l];
    for (int l = 0; l < m; ++l) s += rng.normal() * R[l];

    const Eigen::MatrixXcd h = std::complex<double>(0.0, 1.0) * s.cast<std::complex<double>>();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
    if (es.info() != Eigen::Success) continue;
    const double tol = 1e-9 * scale;
    MatrixXd q(dim, dim);
    int col = 0;
    for (Eigen::Index i = 0; i < dim; ++i) {
      if (es.eigenvalues()(i) <= tol) continue;
      const Eigen::VectorXcd v = es.eigenvectors().col(i);
      q.col(col++) = std::sqrt(2.0) * v.real();
      q.col(col++) = std::sqrt(2.0) * v.imag();
    }
    const MatrixXd ker = real_kernel(s, tol);
    if (col + ker.cols() != dim) continue;
    for (Eigen::Index i = 0; i < ker.cols(); ++i) q.col(col++) = ker.col(i);

    // U = Q^T; read blocks of U A U^T.
    BlockDiagonalization bd;
    bd.U = q.transpose();
    bd.lambda = MatrixXd::Zero(n, m);
    bd.mu = MatrixXd::Zero(n, m);
    for (int l = 0; l < m; ++l) {
      const MatrixXd a = bd.U * spec.A[l] * bd.U.transpose();
      const MatrixXd r = bd.U * R[l] * bd.U.transpose();
      for (int i = 0; i < n; ++i) {
        bd.lambda(i, l) = a(2 * i, 2 * i + 1);
        bd.mu(i, l) = r(2 * i + 1, 2 * i);
      }
    }
    // Orientation: first nonzero lambda (else mu) of each block positive.
    for (int i = 0; i < n; ++i) {
      double lead = 0.0;
      for (int l = 0; l < m && lead == 0.0; ++l)
        if (std::abs(bd.lambda(i, l)) > 1e-12 * scale) lead = bd.lambda(i, l);
      for (int l = 0; l < m && lead == 0.0; ++l)
        if (std::abs(bd.mu(i, l)) > 1e-12 * scale) lead = bd.mu(i, l);
      if (lead < 0.0) {
        bd.U.row(2 * i + 1) *= -1.0;
        bd.lambda.row(i) *= -1.0;
        bd.mu.row(i) *= -1.0;
      }
    }
    // Blocks with vanishing mu first.
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int x, int y) {
      const bool zx = bd.mu.row(x).cwiseAbs().maxCoeff() <= 1e-12 * scale;
      const bool zy = bd.mu.row(y).cwiseAbs().maxCoeff() <= 1e-12 * scale;
      return zx && !zy;
    });
    BlockDiagonalization out;
    out.U.resize(dim, dim);
    out.lambda.resize(n, m);
    out.mu.resize(n, m);
    for (int i = 0; i < n; ++i) {
      out.U.row(2 * i) = bd.U.row(2 * order[i]);
      out.U.row(2 * i + 1) = bd.U.row(2 * order[i] + 1);
      out.lambda.row(i) = bd.lambda.row(order[i]);
      out.mu.row(i) = bd.mu.row(order[i]);
    }
    for (int i = 0; i < n; ++i)
      if (out.mu.row(i).cwiseAbs().maxCoeff() > 1e-12 * scale) ++out.r;

    double residual = unitarity_residual(out.U);
    for (int l = 0; l < m; ++l) {
      const MatrixXd da = block_matrix(out.lambda.col(l), J);
      const MatrixXd dr = block_matrix(out.mu.col(l), -J);
      residual = std::max(residual, (out.U.transpose() * da * out.U - spec.A[l]).cwiseAbs().maxCoeff());
      residual = std::max(residual, (out.U.transpose() * dr * out.U - R[l]).cwiseAbs().maxCoeff());
    }
    out.residual = residual;
    out.attempts = attempt + 1;
    best_residual = std::min(best_residual, residual);
    if (residual <= 1e-10 * scale) return out;
  }
  throw NumericError("degenerate family: block diagonalization failed", best_residual);
}

ConstantsBundle constants(const TransverseGroupSpec& spec) {
  return constants(spec, block_diagonalize(spec));
}

ConstantsBundle constants(const TransverseGroupSpec& spec, const BlockDiagonalization& bd) {
  const auto R = r_or_zero(spec);
  const int dim = 2 * spec.n;
  ConstantsBundle c;
  c.Lambda = MatrixXd::Zero(dim, dim);
  for (int l = 0; l < spec.m; ++l) c.Lambda += spec.A[l] * R[l];
  const double asym = (c.Lambda - c.Lambda.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-10 * family_scale(spec) * family_scale(spec)) {
    throw ConsistencyError("Lambda is not symmetric (residual " + std::to_string(asym) + ")");
  }
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (c.Lambda + c.Lambda.transpose()),
                                             Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericError("eigensolver failed on Lambda", asym);
  c.rho = es.eigenvalues()(0);
  c.rho_minus = std::max(0.0, -c.rho);
  c.rho_i = (bd.lambda.array() * bd.mu.array()).rowwise().sum();
  const VectorXd row_sq = bd.lambda.array().square().rowwise().sum();
  const VectorXd col_sq = bd.lambda.array().square().colwise().sum();
  c.kappa = row_sq.maxCoeff();
  c.gamma = 0.5 * col_sq.minCoeff();
  return c;
}

TransverseGroupSpec spec_from_matrices(std::string id,
                                       const std::vector<MatrixXd>& horizontal,
                                       const std::vector<MatrixXd>& vertical,
                                       double inner_scale) {
  (void)inner_scale;
  const int h = int(horizontal.size()), v = int(vertical.size());
  require(h % 2 == 0 && h > 0 && v > 0, "need an even horizontal frame and a vertical frame");
  const Eigen::Index sz = horizontal[0].size();
  auto flat = [&](const std::vector<MatrixXd>& fam) {
    MatrixXd b(sz, Eigen::Index(fam.size()));
    for (std::size_t k = 0; k < fam.size(); ++k)
      b.col(Eigen::Index(k)) = Eigen::Map<const VectorXd>(fam[k].data(), sz);
    return b;
  };
  const MatrixXd bh = flat(horizontal), bv = flat(vertical);
  const auto qh = bh.colPivHouseholderQr();
  const auto qv = bv.colPivHouseholderQr();
  TransverseGroupSpec s;
  s.id = std::move(id);
  s.n = h / 2;
  s.m = v;
  s.A.assign(v, MatrixXd::Zero(h, h));
  s.R.assign(v, MatrixXd::Zero(h, h));
  for (int i = 0; i < h; ++i) {
    for (int j = 0; j < h; ++j) {
      const MatrixXd br = commutator(horizontal[i], horizontal[j]);
      const VectorXd target = Eigen::Map<const VectorXd>(br.data(), sz);
      const VectorXd coef = qv.solve(target);
      require((bv * coef - target).cwiseAbs().maxCoeff() <= 1e-10,
              "horizontal bracket leaves the vertical span");
      for (int l = 0; l < v; ++l) s.A[l](i, j) = coef(l);
    }
    for (int l = 0; l < v; ++l) {
      const MatrixXd br = commutator(horizontal[i], vertical[l]);
      const VectorXd target = Eigen::Map<const VectorXd>(br.data(), sz);
      const VectorXd coef = qh.solve(target);
      require((bh * coef - target).cwiseAbs().maxCoeff() <= 1e-10,
              "mixed bracket leaves the horizontal span");
      s.R[l].row(i) = coef.transpose();
    }
  }
  for (auto* fam : {&s.A, &s.R})
    for (auto& m : *fam) m = m.unaryExpr([](double x) { return std::abs(x) < 1e-14 ? 0.0 : x; });
  return s;
}

TransverseGroupSpec block_family(std::string id, const MatrixXd& lambda, const MatrixXd& mu) {
  require(lambda.rows() == mu.rows() && lambda.cols() == mu.cols(), "lambda/mu shape mismatch");
  TransverseGroupSpec s;
  s.id = std::move(id);
  s.n = int(lambda.rows());
  s.m = int(lambda.cols());
  const Eigen::Matrix2d J = symplectic_block();
  for (int l = 0; l < s.m; ++l) {
    s.A.push_back(block_matrix(lambda.col(l), J));
    s.R.push_back(block_matrix(mu.col(l), -J));
  }
  return s;
}

TransverseGroupSpec conjugate(const TransverseGroupSpec& spec, const MatrixXd& Q) {
  TransverseGroupSpec s = spec;
  for (auto& a : s.A) a = Q * a * Q.transpose();
  s.R = r_or_zero(spec);
  for (auto& r : s.R) r = Q * r * Q.transpose();
  return s;
}

TransverseGroupSpec heisenberg_spec(int n) {
  require(n >= 1, "heisenberg:n needs n >= 1");
  return block_family("heisenberg:" + std::to_string(n), MatrixXd::Ones(n, 1),
                      MatrixXd::Zero(n, 1));
}

namespace {

Eigen::Matrix3d so3_generator(int i, int j) {
  Eigen::Matrix3d e = Eigen::Matrix3d::Zero();
  e(i, j) = 1.0;
  e(j, i) = -1.0;
  return e;
}

std::vector<MatrixXd> realified(const std::vector<Eigen::Matrix2cd>& ms) {
  std::vector<MatrixXd> out;
  for (const auto& m : ms) out.push_back(realify(m));
  return out;
}

}  // namespace

TransverseGroupSpec so3_spec() {
  // X_1 = E12 - E21, X_2 = E13 - E31, Z = E23 - E32: [X1,X2] = -Z,
  // [X1,Z] = X2, [X2,Z] = -X1.
  return spec_from_matrices("so3", {so3_generator(0, 1), so3_generator(0, 2)},
                            {so3_generator(1, 2)});
}

TransverseGroupSpec su2_spec() {
  const auto e = su2_basis();
  return spec_from_matrices("su2", realified({e[0], e[1]}), realified({e[2]}));
}

TransverseGroupSpec so4_spec() {
  const auto sp = so4_split();
  const double c = std::pow(2.0, -0.25);
  return spec_from_matrices("so4",
                            {c * sp.X[0], c * sp.X[1], c * sp.Z[0], c * sp.Z[1]},
                            {sp.X[2], sp.Z[2]});
}

TransverseGroupSpec vandermonde_family(int n, int m) {
  require(n >= 1 && m >= 1 && m <= n, "vandermonde:n:m needs 1 <= m <= n");
  MatrixXd lambda(n, m);
  for (int i = 0; i < n; ++i)
    for (int l = 0; l < m; ++l) lambda(i, l) = std::pow(double(i + 1), 0.5 * l);
  return block_family("vandermonde:" + std::to_string(n) + ":" + std::to_string(m), lambda,
                      MatrixXd::Zero(n, m));
}

TransverseGroupSpec make_transverse_spec(const std::string& id) {
  if (id == "so3") return so3_spec();
  if (id == "su2") return su2_spec();
  if (id == "so4") return so4_spec();
  if (id == "heisenberg3") return heisenberg_spec(1);
  auto num = [&](const std::string& s) {
    try {
      std::size_t used = 0;
      const int v = std::stoi(s, &used);
      if (used == s.size()) return v;
    } catch (const std::exception&) {
    }
    throw InputError("bad integer in group id '" + id + "'");
  };
  if (id.rfind("heisenberg:", 0) == 0) return heisenberg_spec(num(id.substr(11)));
  if (id.rfind("vandermonde:", 0) == 0) {
    const auto rest = id.substr(12);
    const auto colon = rest.find(':');
    require(colon != std::string::npos, "vandermonde id needs n:m");
    return vandermonde_family(num(rest.substr(0, colon)), num(rest.substr(colon + 1)));
  }
  throw InputError("unknown group id '" + id + "'");
}

VectorXd spec_bracket(const TransverseGroupSpec& spec, const VectorXd& a, const VectorXd& b) {
  const int h = 2 * spec.n, m = spec.m;
  const auto R = r_or_zero(spec);
  VectorXd out = VectorXd::Zero(h + m);
  const VectorXd x = a.head(h), xp = b.head(h);
  for (int l = 0; l < m; ++l) {
    out(h + l) = x.dot(spec.A[l] * xp);
    out.head(h) += b(h + l) * R[l].transpose() * x - a(h + l) * R[l].transpose() * xp;
  }
  return out;
}

namespace {

VectorXd model_bracket(const VectorXd& rho, const VectorXd& a, const VectorXd& b) {
  VectorXd out = VectorXd::Zero(a.size());
  for (Eigen::Index i = 0; i < rho.size(); ++i) {
    const Eigen::Vector3d u = a.segment<3>(3 * i), v = b.segment<3>(3 * i);
    // [X1,X2] = Z, [X1,Z] = -rho X2, [X2,Z] = rho X1
    const double c12 = u(0) * v(1) - u(1) * v(0);
    const double c13 = u(0) * v(2) - u(2) * v(0);
    const double c23 = u(1) * v(2) - u(2) * v(1);
    out(3 * i) = rho(i) * c23;
    out(3 * i + 1) = -rho(i) * c13;
    out(3 * i + 2) = c12;
  }
  return out;
}

}  // namespace

Submersion build_submersion(const TransverseGroupSpec& spec) {
  Submersion s;
  s.blocks = block_diagonalize(spec);
  const int n = spec.n, m = spec.m, h = 2 * n;
  s.rank = numeric_rank(s.blocks.lambda);
  if (s.rank != m) {
    throw InputError("lambda matrix has rank " + std::to_string(s.rank) +
                     " < m; the algebra map is not surjective");
  }
  s.rho_i = (s.blocks.lambda.array() * s.blocks.mu.array()).rowwise().sum();
  s.phi = MatrixXd::Zero(h + m, 3 * n);
  for (int i = 0; i < n; ++i) {
    s.phi.col(3 * i).head(h) = s.blocks.U.row(2 * i).transpose();
    s.phi.col(3 * i + 1).head(h) = s.blocks.U.row(2 * i + 1).transpose();
    s.phi.col(3 * i + 2).tail(m) = s.blocks.lambda.row(i).transpose();
  }
  const double scale = family_scale(spec);
  for (int a = 0; a < 3 * n; ++a) {
    for (int b = 0; b < 3 * n; ++b) {
      const VectorXd ea = VectorXd::Unit(3 * n, a), eb = VectorXd::Unit(3 * n, b);
      const VectorXd lhs = s.phi * model_bracket(s.rho_i, ea, eb);
      const VectorXd rhs = spec_bracket(spec, s.phi.col(a), s.phi.col(b));
      const double res = (lhs - rhs).cwiseAbs().maxCoeff() / (scale * scale);
      if (a / 3 == b / 3) s.within_block_residual = std::max(s.within_block_residual, res);
      else s.cross_block_residual = std::max(s.cross_block_residual, res);
    }
  }
  if (s.within_block_residual > 1e-12) {
    throw ConsistencyError("algebra map fails the bracket identities (residual " +
                           std::to_string(s.within_block_residual) + ")");
  }
  s.step2 = true;
  for (const auto& r : spec.R) s.step2 = s.step2 && r.cwiseAbs().maxCoeff() == 0.0;
  return s;
}

VectorXd Submersion::map_point(const VectorXd& source) const {
  require(step2, "coordinate-level map is only available for step-2 targets");
  const Eigen::Index n = blocks.lambda.rows(), m = blocks.lambda.cols();
  require(source.size() == 3 * n, "source point must have 3n coordinates");
  VectorXd xp(2 * n), zp(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    xp(2 * i) = source(3 * i);
    xp(2 * i + 1) = source(3 * i + 1);
    zp(i) = source(3 * i + 2);
  }
  VectorXd out(2 * n + m);
  out << blocks.U.transpose() * xp, blocks.lambda.transpose() * zp;
  return out;
}

std::string to_string(ModelTag tag) {
  switch (tag) {
    case ModelTag::Heisenberg: return "heisenberg";
    case ModelTag::SU2: return "su2";
    case ModelTag::SL2Cover: return "sl2-cover";
  }
  return "unknown";
}

ModelSpaceClass classify_model_space(double rho, double zero_threshold) {
  require(std::isfinite(rho), "rho must be finite");
  if (std::abs(rho) < zero_threshold) return {ModelTag::Heisenberg, 1.0};
  return {rho > 0 ? ModelTag::SU2 : ModelTag::SL2Cover, std::abs(rho)};
}

TransverseConstants transverse_constants(const ConstantsBundle& c, double t, int n) {
  require(t > 0.0, "transverse constants need t > 0");
  TransverseConstants k;
  const double rho = c.rho, rm = c.rho_minus;
  k.numerator = 5.0 + rm * t;
  k.rp = k.numerator / (2.0 * t);
  k.rls = k.numerator / t;
  k.ly_a = 4.0 - 2.0 * rho * t / 3.0;
  k.ly_b = n * rho * rho * t / 3.0 - 4.0 * n * rho + 16.0 * n / t;
  const double ratio = c.kappa / c.gamma;
  k.cd_numerator = 1.0 + 2.0 * ratio + rm;
  k.cd_rp = k.cd_numerator / (2.0 * t);
  k.cd_rls = k.cd_numerator / t;
  const double q = 1.0 + 1.5 * ratio;
  k.cd_ly_a = q - 2.0 * rho * t / 3.0;
  k.cd_ly_b = n * rho * rho * t / 3.0 - n * rho * q + n * q * q / t;
  return k;
}

std::array<Eigen::Matrix2cd, 3> su2_basis() {
  using C = std::complex<double>;
  const C i(0.0, 1.0);
  Eigen::Matrix2cd s1, s2, s3;
  s1 << 0, 1, 1, 0;
  s2 << 0, -i, i, 0;
  s3 << 1, 0, 0, -1;
  return {-0.5 * i * s1, -0.5 * i * s2, -0.5 * i * s3};
}

Eigen::Matrix4d realify(const Eigen::Matrix2cd& m) {
  Eigen::Matrix4d r;
  r << m.real(), -m.imag(), m.imag(), m.real();
  return r;
}

namespace {

Eigen::Matrix4d intertwiner(const std::array<Eigen::Matrix4d, 3>& src,
                            const std::array<Eigen::Matrix4d, 3>& dst) {
  // T src_k = dst_k T  <=>  (src_k^T (x) I - I (x) dst_k) vec(T) = 0.
  Eigen::Matrix<double, 48, 16> sys;
  const Eigen::Matrix4d I = Eigen::Matrix4d::Identity();
  for (int k = 0; k < 3; ++k) {
    Eigen::Matrix<double, 16, 16> blk;
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b)
        blk.block<4, 4>(4 * a, 4 * b) = src[k](b, a) * I - (a == b ? dst[k] : Eigen::Matrix4d::Zero());
    sys.block<16, 16>(16 * k, 0) = blk;
  }
  Eigen::JacobiSVD<MatrixXd> svd(sys, Eigen::ComputeFullV);
  const VectorXd v = svd.matrixV().col(15);
  Eigen::Matrix4d t = Eigen::Map<const Eigen::Matrix4d>(v.data());
  const double s = (t.transpose() * t).trace() / 4.0;
  t /= std::sqrt(s);
  double res = unitarity_residual(t);
  for (int k = 0; k < 3; ++k)
    res = std::max(res, (t * src[k] - dst[k] * t).cwiseAbs().maxCoeff());
  if (res > 1e-10) throw ConsistencyError("su(2) intertwiner residual " + std::to_string(res));
  return t;
}

}  // namespace

SO4Split so4_split() {
  SO4Split s;
  auto e = [](int i, int j) {
    Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
    m(i, j) = 1.0;
    return m;
  };
  for (int j = 0; j < 3; ++j) s.X[j] = e(j + 1, 0) - e(0, j + 1);
  s.Z[0] = commutator(s.X[1], s.X[2]);
  s.Z[1] = commutator(s.X[2], s.X[0]);
  s.Z[2] = commutator(s.X[0], s.X[1]);
  const double r2 = std::sqrt(2.0);
  for (int i = 0; i < 3; ++i) {
    s.U[i] = (s.X[i] + s.Z[i]) / r2;
    s.V[i] = (-s.X[i] + s.Z[i]) / r2;
  }
  double res = 0.0;
  for (int i = 0; i < 3; ++i) {
    const int j = (i + 1) % 3, k = (i + 2) % 3;
    res = std::max(res, (commutator(s.U[i], s.U[j]) - r2 * s.U[k]).cwiseAbs().maxCoeff());
    res = std::max(res, (commutator(s.V[i], s.V[j]) - r2 * s.V[k]).cwiseAbs().maxCoeff());
    for (int q = 0; q < 3; ++q) res = std::max(res, commutator(s.U[i], s.V[q]).cwiseAbs().maxCoeff());
  }
  s.bracket_residual = res;
  if (res > 1e-12) throw ConsistencyError("so(4) bracket relations fail (" + std::to_string(res) + ")");
  std::array<Eigen::Matrix4d, 6> all = {s.U[0], s.U[1], s.U[2], s.V[0], s.V[1], s.V[2]};
  for (int a = 0; a < 6; ++a)
    for (int b = 0; b < 6; ++b) s.gram(a, b) = (all[a] * all[b].transpose()).trace();
  const auto basis = su2_basis();
  const std::array<Eigen::Matrix4d, 3> src = {realify(basis[0]), realify(basis[1]), realify(basis[2])};
  s.intertwiner_u = intertwiner(src, {s.U[0] / r2, s.U[1] / r2, s.U[2] / r2});
  s.intertwiner_v = intertwiner(src, {s.V[0] / r2, s.V[1] / r2, s.V[2] / r2});
  return s;
}

}  // namespace hypo
