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
#include <string>
#include <vector>

#include "hypo/kernel.hpp"
#include "hypo/lie.hpp"
#include "hypo/report.hpp"
#include "hypo/test_functions.hpp"

namespace hypo {

using ConstantFn = std::function<double(double t)>;
/// Time-dependent matrix acting on frame-gradient vectors.
using FormFn = std::function<Eigen::MatrixXd(double t)>;

struct CheckContext {
  KernelPtr kernel;
  long paths = 100000;
  std::uint64_t key = 0;
  Verdict verdict;
  /// Stencil for gradients of P_t f; 0 picks 1e-3 (simulated) or 1e-5 (analytic).
  double fd_step = 0.0;
  double laplacian_step = 1e-4;
  std::string job;
};

/// Frame coefficients (X_1 f, ..., X_K f)(p) by central differences along the
/// frame flows, h = 1e-5 (1 + |p|). With an exact gradient the exact value is
/// returned after a cross-check; relative mismatch above 1e-4 throws
/// ConsistencyError.
Point horizontal_gradient(const MarkovKernel& kernel, const TestFunction& f, const Point& p);

/// Gamma_t(f) = sum (d_xi f - t/2 d_yi f)^2 + t^2/12 sum (d_yi f)^2, as a quadratic form.
Eigen::MatrixXd kolmogorov_twisted_form(int d, double t);
double kolmogorov_twisted_gradient(const TestFunction& f, const Point& p, double t);
/// Rows x_i + factor * t * y_i (factor 1 for the stated bound, 1/2 for the
/// component bound).
Eigen::MatrixXd kolmogorov_shear_map(int d, double t, double factor);
Eigen::MatrixXd kolmogorov_x_map(int d);

/// ||L grad P_t f|| <= C (P_t ||R grad f||^p)^{1/p}; L, R default to identity.
std::vector<InequalityReport> check_gradient_bound(const CheckContext& ctx, const std::vector<TestFunction>& fs,
                                                   const Point& point, const std::vector<double>& times, double p,
                                                   const ConstantFn& C, const FormFn& lhs_map = {},
                                                   const FormFn& rhs_map = {});
/// grad P_t f . Q grad P_t f <= C(t) (P_t f^2 - (P_t f)^2); Q defaults to identity.
std::vector<InequalityReport> check_reverse_poincare(const CheckContext& ctx, const std::vector<TestFunction>& fs,
                                                     const Point& point, const std::vector<double>& times,
                                                     const ConstantFn& C, const FormFn& Q = {});
/// grad P_t f . Q grad P_t f / P_t f <= C(t) (P_t(f log f) - P_t f log P_t f).
std::vector<InequalityReport> check_reverse_log_sobolev(const CheckContext& ctx,
                                                        const std::vector<TestFunction>& fs, const Point& point,
                                                        const std::vector<double>& times, const ConstantFn& C,
                                                        const FormFn& Q = {});
/// ||grad log P_t f||^2 <= a(t) Delta P_t f / P_t f + b(t).
std::vector<InequalityReport> check_li_yau(const CheckContext& ctx, const std::vector<TestFunction>& fs,
                                           const Point& point, const std::vector<double>& times, const ConstantFn& a,
                                           const ConstantFn& b);
/// (P_t f(x))^p <= P_t f^p(y) exp(p/(p-1) C(t) d^2/4).
std::vector<InequalityReport> check_wang_harnack(const CheckContext& ctx, const std::vector<TestFunction>& fs,
                                                 const Point& x, const Point& y, const std::vector<double>& times,
                                                 double p, const ConstantFn& C, double distance);
/// P_s f(x) <= P_t f(y) (t/s)^{8n} exp(4 d^2/(t-s)); a second, informational
/// row checks the same bound with P_t f(x) on the left.
std::vector<InequalityReport> check_parabolic_harnack(const CheckContext& ctx, const std::vector<TestFunction>& fs,
                                                      const Point& x, const Point& y, double s, double t, int n,
                                                      double distance);

struct ContractionOptions {
  int samples = 512;
  int bootstrap = 20;
};
/// W_q(delta_x P_t, delta_y P_t) <= C d(x, y), clouds of `samples` points
/// compared by exact transport; stderr from a paired bootstrap.
InequalityReport check_wasserstein_contraction(const CheckContext& ctx, const Point& x, const Point& y, double t,
                                               double q, double C, const ContractionOptions& opts = {});
/// He^2(delta_x P_t, delta_y P_t) <= (C/4) d_t(x, y)^2 for the Kolmogorov
/// kernel, C = 1/(sigma^2 t).
InequalityReport check_hellinger_contraction(const KolmogorovSpec& spec, const Point& x, const Point& y, double t);

/// |E f(observe(M-path)) - E f(N-path)| within 3 combined stderr.
std::vector<InequalityReport> check_intertwining(const CheckContext& ctx, const KernelPtr& direct,
                                                 const std::vector<TestFunction>& fs, const Point& pushed_start,
                                                 const Point& direct_start, double t);

/// Constants for G_{n,m}: RP 1/t, RLS 5/t, Li-Yau (4, 16n/t).
struct CarnotConstants {
  double rp, rls, ly_a, ly_b;
};
CarnotConstants carnot_constants(int n, double t);

/// Kinetic Fokker-Planck with quadratic potentials: the best constant in
/// ||grad P_t f||^2 <= c/min(t,1)^3 P_t f^2 at time t is the top eigenvalue of
/// M^T Sigma^{-1} M times min(t,1)^3.
double kinetic_rpi_ratio(const KineticFPSpec& spec, double t);
double fit_kinetic_constant(const KineticFPSpec& spec, const std::vector<double>& times);
std::vector<InequalityReport> check_kinetic_rpi(const KineticFPSpec& spec, const std::vector<TestFunction>& fs,
                                                const Point& point, const std::vector<double>& times, double c);

}  // namespace hypo
