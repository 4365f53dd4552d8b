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
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hypo/lie.hpp"
#include "hypo/metric.hpp"
#include "hypo/rng.hpp"

namespace hypo {

/// Endpoint law M * start + shift + N(0, cov).
struct GaussianLaw {
  Eigen::MatrixXd M;
  Point shift;
  Eigen::MatrixXd cov;
};

/// Markov kernel P_t. Samplers run in "state" coordinates; observe() maps a
/// state to the coordinates test functions see (identity except for
/// pushforwards). Horizontal frames are given by flows and vector fields.
class MarkovKernel {
 public:
  MarkovKernel(std::string id, MetricSpace space) : id_(std::move(id)), space_(std::move(space)) {}
  virtual ~MarkovKernel() = default;

  const std::string& id() const { return id_; }
  const MetricSpace& space() const { return space_; }
  int dimension() const { return space_.dimension; }
  virtual int observed_dimension() const { return dimension(); }

  virtual bool analytic() const { return false; }
  virtual Point sample(const Point& start, double t, RandomStream& rng) const = 0;
  /// One path observed at increasing times.
  virtual std::vector<Point> sample_path(const Point& start, const std::vector<double>& times,
                                         RandomStream& rng) const;
  virtual Point observe(const Point& state) const { return state; }
  /// False when observe() is not the identity.
  virtual bool observes_state() const { return true; }
  Point sample_observed(const Point& start, double t, RandomStream& rng) const {
    return observe(sample(start, t, rng));
  }

  /// Exact law when the kernel is affine-Gaussian.
  virtual std::optional<GaussianLaw> gaussian_law(double) const { return std::nullopt; }

  /// Left-invariant kernels satisfy sample(g) = multiply(g, sample(identity)).
  virtual bool left_invariant() const { return false; }
  virtual Point identity() const { return Point::Zero(dimension()); }
  virtual Point multiply(const Point&, const Point&) const;

  virtual int frame_size() const { return dimension(); }
  /// Flow of the k-th frame field for time s from p.
  virtual Point flow(const Point& p, int k, double s) const;
  /// Frame fields at p as columns in state coordinates.
  virtual Eigen::MatrixXd frame(const Point& p) const;
  /// Whether sum_k E_k^2 is the generator (Li-Yau needs it).
  virtual bool frame_generates() const { return true; }

 protected:
  std::string id_;
  MetricSpace space_;
};

using KernelPtr = std::shared_ptr<const MarkovKernel>;

/// Kernel whose law is affine Gaussian for every t.
class GaussianKernel : public MarkovKernel {
 public:
  using LawFn = std::function<GaussianLaw(double)>;
  GaussianKernel(std::string id, MetricSpace space, LawFn law, bool frame_generates);

  bool analytic() const override { return true; }
  Point sample(const Point& start, double t, RandomStream& rng) const override;
  std::optional<GaussianLaw> gaussian_law(double t) const override { return law_(t); }
  bool frame_generates() const override { return generates_; }

 private:
  LawFn law_;
  bool generates_;
};

/// dX = sqrt(2) sigma dB, dY = X dt per coordinate; state (x_1..x_d, y_1..y_d).
struct KolmogorovSpec {
  Eigen::VectorXd sigma;
  void validate() const;
};

GaussianLaw kolmogorov_law(const KolmogorovSpec& spec, double t);
KernelPtr kolmogorov_kernel(const KolmogorovSpec& spec);

/// Standard Brownian motion with generator the Laplacian on R^d.
KernelPtr euclidean_heat_kernel(int d);

struct Potential {
  std::string id;
  std::function<double(double)> grad;
  /// Curvature V'' = k when the potential is quadratic (k x^2 / 2).
  std::optional<double> quadratic;
  std::optional<double> growth_constant;
};

Potential quadratic_potential(double k);
Potential zero_potential();
Potential quartic_potential();

/// dX = Y dt, dY = dW - V'(X) dt - Y dt per coordinate; state (x, y).
struct KineticFPSpec {
  std::vector<Potential> potentials;
  std::optional<std::pair<double, double>> convexity;  // (m, M)
  void validate() const;
  int d() const { return int(potentials.size()); }
};

/// Linear-SDE law for quadratic potentials (matrix exponential + Van Loan).
GaussianLaw kinetic_linear_law(const KineticFPSpec& spec, double t);
KernelPtr kinetic_fp_kernel(const KineticFPSpec& spec, double dt);
/// Exact Gaussian kernel of the same SDE when all potentials are quadratic.
KernelPtr kinetic_linear_kernel(const KineticFPSpec& spec);

/// Horizontal Brownian motion on G_{n,m}, generator sum X_i^2 with
/// X_i = d/dx_i - 1/2 sum_l <A_l x, e_i> d/dy_l.
class CarnotKernel : public MarkovKernel {
 public:
  CarnotKernel(std::string id, int n, std::vector<Eigen::MatrixXd> A, double dt);

  Point sample(const Point& start, double t, RandomStream& rng) const override;
  std::vector<Point> sample_path(const Point& start, const std::vector<double>& times,
                                 RandomStream& rng) const override;
  bool left_invariant() const override { return true; }
  Point multiply(const Point& g, const Point& h) const override;
  int frame_size() const override { return 2 * n_; }
  Point flow(const Point& p, int k, double s) const override;
  Eigen::MatrixXd frame(const Point& p) const override;
  double dt() const { return dt_; }

 private:
  struct Entry { int l, i, j; double a; };
  int n_, m_;
  std::vector<Eigen::MatrixXd> A_;
  std::vector<Entry> entries_;
  double dt_;
};

KernelPtr carnot_step2_kernel(const std::vector<Eigen::MatrixXd>& A, int n, int m, double dt);
KernelPtr heisenberg_kernel(double dt);

enum class DriftPolicy { Reorthonormalize, Strict };

enum class MatrixGroup { SO3, SO4, SU2 };

/// Geodesic random walk g <- g exp(sum_k sqrt(2 dt) xi_k E_k); points are
/// flattened matrices (column-major, real parts then imaginary parts).
KernelPtr lie_group_walk_kernel(MatrixGroup group, const std::vector<Eigen::MatrixXcd>& frame,
                                double dt, DriftPolicy policy = DriftPolicy::Reorthonormalize,
                                std::string id = "");
KernelPtr so3_kernel(double dt);
KernelPtr so4_kernel(double dt);
/// Model space M(rho): SU(2) walk with frame sqrt(rho) e_1, sqrt(rho) e_2 for
/// rho > 0, H^3 for rho = 0; rho < 0 is not simulated.
KernelPtr model_space_kernel(double rho, double dt);

Point flatten(const Eigen::MatrixXcd& g, bool complex);
Eigen::MatrixXcd unflatten(const Point& p, int size, bool complex);

/// exp of so(3), so(4), su(2) elements in closed form.
Eigen::Matrix3d so3_exp(const Eigen::Matrix3d& a);
Eigen::Matrix4d so4_exp(const Eigen::Matrix4d& a);
Eigen::Matrix2cd su2_exp(const Eigen::Matrix2cd& a);
/// Nearest orthogonal / unitary matrix.
Eigen::MatrixXcd polar_project(const Eigen::MatrixXcd& g);

KernelPtr tensor_kernel(const std::vector<KernelPtr>& kernels);

/// Observed point = map(state); flows and products stay on the source.
KernelPtr pushforward_kernel(KernelPtr base, std::function<Point(const Point&)> map,
                             int observed_dimension, std::string id);

/// M(sqrt 2) x M(sqrt 2) -> SO(4), observed as a flattened 4x4 matrix.
KernelPtr so4_from_model_pair(double dt);
/// H^3 x ... x H^3 -> G_{n,m} through the submersion's coordinate map.
KernelPtr carnot_from_heisenberg_product(const Submersion& sub, double dt);

/// Parses kernel ids: "kolmogorov:s1,s2,...", "heisenberg3", "carnot:<group id>",
/// "so3", "so4", "su2-full", "model:rho", "euclidean:d", "kinetic:<pot>,...",
/// "so4-from-model", "product:[id,id]".
KernelPtr make_kernel(const std::string& id, double dt);

}  // namespace hypo
