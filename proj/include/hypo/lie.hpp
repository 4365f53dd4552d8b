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

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hypo/core.hpp"

namespace hypo {

template <typename DerivedA, typename DerivedB>
auto commutator(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  return (a * b - b * a).eval();
}

/// Largest entry of A + A^* (zero for skew-symmetric / anti-Hermitian A).
template <typename Derived>
double skew_residual(const Eigen::MatrixBase<Derived>& a) {
  return (a + a.adjoint()).cwiseAbs().maxCoeff();
}

/// Distance of a matrix from the orthogonal / unitary group, max |G^*G - I|.
template <typename Derived>
double unitarity_residual(const Eigen::MatrixBase<Derived>& g) {
  using M = Eigen::Matrix<typename Derived::Scalar, Derived::RowsAtCompileTime,
                          Derived::ColsAtCompileTime>;
  const M gg = g.adjoint() * g;
  return (gg - M::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff();
}

/// 2x2 rotation generator [[0, 1], [-1, 0]].
Eigen::Matrix2d symplectic_block();

/// Lie algebra with orthonormal basis X_1..X_2n, Z_1..Z_m and
/// [X_i, X_j] = sum_l A_l(i,j) Z_l, [X_i, Z_l] = sum_j R_l(i,j) X_j.
struct TransverseGroupSpec {
  std::string id;
  int n = 0;
  int m = 0;
  std::vector<Eigen::MatrixXd> A;
  std::vector<Eigen::MatrixXd> R;
};

struct ConditionResult {
  std::string name;
  bool pass = false;
  double residual = 0.0;
  std::string detail;
};

struct ValidationReport {
  std::vector<ConditionResult> conditions;
  bool ok() const;
  std::string summary() const;
};

ValidationReport validate_spec(const TransverseGroupSpec& spec);

/// U A_l U^T and U R_l U^T are 2x2 block diagonal with blocks
/// lambda_il [[0,1],[-1,0]] and mu_il [[0,-1],[1,0]].
struct BlockDiagonalization {
  Eigen::MatrixXd U;
  Eigen::MatrixXd lambda;  // n x m
  Eigen::MatrixXd mu;      // n x m
  int r = 0;               // blocks with a nonzero mu row
  double residual = 0.0;   // worst off-block or reconstruction entry
  int attempts = 0;
};

BlockDiagonalization block_diagonalize(const TransverseGroupSpec& spec,
                                       std::uint64_t seed = 0x5eedULL,
                                       int max_retries = 10);

struct ConstantsBundle {
  Eigen::MatrixXd Lambda;
  double rho = 0.0;
  double rho_minus = 0.0;
  double gamma = 0.0;
  double kappa = 0.0;
  Eigen::VectorXd rho_i;
};

ConstantsBundle constants(const TransverseGroupSpec& spec);
ConstantsBundle constants(const TransverseGroupSpec& spec, const BlockDiagonalization& bd);

/// Structure constants of a matrix Lie algebra in a given frame. The inner
/// product is scale * tr(X Y^T); vertical vectors are taken orthonormal.
TransverseGroupSpec spec_from_matrices(std::string id,
                                       const std::vector<Eigen::MatrixXd>& horizontal,
                                       const std::vector<Eigen::MatrixXd>& vertical,
                                       double inner_scale = 1.0);

TransverseGroupSpec heisenberg_spec(int n);
TransverseGroupSpec so3_spec();
TransverseGroupSpec su2_spec();
TransverseGroupSpec so4_spec();
/// lambda_il = i^((l-1)/2) on blocks, R = 0; sum_l lambda_il^2 = sum_l i^(l-1).
TransverseGroupSpec vandermonde_family(int n, int m);
/// Block-diagonal family from lambda and mu tables.
TransverseGroupSpec block_family(std::string id, const Eigen::MatrixXd& lambda,
                                 const Eigen::MatrixXd& mu);
TransverseGroupSpec conjugate(const TransverseGroupSpec& spec, const Eigen::MatrixXd& Q);
/// Parses "heisenberg:n", "so3", "su2", "so4", "vandermonde:n:m".
TransverseGroupSpec make_transverse_spec(const std::string& id);

/// Bracket in coordinates (X_1..X_2n, Z_1..Z_m); [Z_l, Z_k] = 0.
Eigen::VectorXd spec_bracket(const TransverseGroupSpec& spec, const Eigen::VectorXd& a,
                             const Eigen::VectorXd& b);

/// Algebra map from prod M(rho_i) to g plus the coordinate map for step-2 targets.
struct Submersion {
  BlockDiagonalization blocks;
  Eigen::VectorXd rho_i;
  /// (2n+m) x 3n; source basis ordered (X'_1, X'_2, Z'_1, X'_3, X'_4, Z'_2, ...).
  Eigen::MatrixXd phi;
  int rank = 0;
  double within_block_residual = 0.0;
  /// Brackets [X'_a, Z'_k] for a outside block k; zero only when
  /// sum_l lambda_kl mu_il = 0 for i != k (always so when R = 0).
  double cross_block_residual = 0.0;
  bool step2 = false;

  bool homomorphism(double tol = 1e-12) const {
    return within_block_residual <= tol && cross_block_residual <= tol;
  }
  /// H^3 x ... x H^3 (layout (a_i, b_i, z_i) per factor) to G_{n,m} in
  /// exponential coordinates; only for step-2 targets.
  Eigen::VectorXd map_point(const Eigen::VectorXd& source) const;
};

Submersion build_submersion(const TransverseGroupSpec& spec);

enum class ModelTag { Heisenberg, SU2, SL2Cover };
std::string to_string(ModelTag tag);

struct ModelSpaceClass {
  ModelTag tag;
  double alpha;
};

ModelSpaceClass classify_model_space(double rho, double zero_threshold = 1e-12);

struct TransverseConstants {
  double rp = 0, rls = 0, ly_a = 0, ly_b = 0;
  double cd_rp = 0, cd_rls = 0, cd_ly_a = 0, cd_ly_b = 0;
  double numerator = 5.0;     // 5 + rho^- t
  double cd_numerator = 0.0;  // 1 + 2 kappa/gamma + rho^-
};

TransverseConstants transverse_constants(const ConstantsBundle& c, double t, int n);

/// so(4) splitting into two commuting su(2) copies.
struct SO4Split {
  std::array<Eigen::Matrix4d, 3> X, Z, U, V;
  double bracket_residual = 0.0;
  /// Gram matrix of (U_1..U_3, V_1..V_3) under tr(A B^T).
  Eigen::Matrix<double, 6, 6> gram;
  /// Orthogonal 4x4 T with T realify(e_i) T^T = U_i / sqrt(2), resp. V_i.
  Eigen::Matrix4d intertwiner_u, intertwiner_v;
};

SO4Split so4_split();

/// Standard su(2) basis e_k = -(i/2) sigma_k, [e_1, e_2] = e_3.
std::array<Eigen::Matrix2cd, 3> su2_basis();
/// Real 4x4 form of a complex 2x2 matrix acting on (Re z, Im z).
Eigen::Matrix4d realify(const Eigen::Matrix2cd& m);

}  // namespace hypo
