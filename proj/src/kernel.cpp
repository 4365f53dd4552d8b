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

#include "hypo/kernel.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

#include <unsupported/Eigen/MatrixFunctions>

namespace hypo {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

int step_count(double t, double dt) {
  return std::max(1, static_cast<int>(std::ceil(t / dt - 1e-9)));
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", x);
  return buf;
}

}  // namespace

std::vector<Point> MarkovKernel::sample_path(const Point& start, const std::vector<double>& times,
                                             RandomStream& rng) const {
  std::vector<Point> out;
  out.reserve(times.size());
  Point cur = start;
  double now = 0.0;
  for (double t : times) {
    require(t >= now, "sample times must be nondecreasing");
    cur = sample(cur, t - now, rng);
    now = t;
    out.push_back(cur);
  }
  return out;
}

Point MarkovKernel::multiply(const Point&, const Point&) const {
  throw UnsupportedError("kernel " + id_ + " has no group structure");
}

Point MarkovKernel::flow(const Point& p, int k, double s) const {
  Point q = p;
  q(k) += s;
  return q;
}

MatrixXd MarkovKernel::frame(const Point&) const {
  return MatrixXd::Identity(dimension(), dimension());
}

GaussianKernel::GaussianKernel(std::string id, MetricSpace space, LawFn law, bool frame_generates)
    : MarkovKernel(std::move(id), std::move(space)), law_(std::move(law)), generates_(frame_generates) {}

Point GaussianKernel::sample(const Point& start, double t, RandomStream& rng) const {
  require(start.size() == dimension(), "start point has wrong dimension for " + id_);
  if (t == 0.0) return start;
  const GaussianLaw law = law_(t);
  Eigen::LLT<MatrixXd> llt(law.cov);
  if (llt.info() != Eigen::Success) throw NumericError("kernel covariance is not positive definite", 0.0);
  VectorXd xi(dimension());
  for (Eigen::Index i = 0; i < xi.size(); ++i) xi(i) = rng.normal();
  return law.M * start + law.shift + llt.matrixL() * xi;
}

void KolmogorovSpec::validate() const {
  require(sigma.size() > 0, "kolmogorov spec needs at least one coordinate");
  require((sigma.array() > 0.0).all(), "kolmogorov sigma_j must be positive");
}

GaussianLaw kolmogorov_law(const KolmogorovSpec& spec, double t) {
  spec.validate();
  const Eigen::Index d = spec.sigma.size();
  GaussianLaw law;
  law.M = MatrixXd::Identity(2 * d, 2 * d);
  law.M.block(d, 0, d, d) = t * MatrixXd::Identity(d, d);
  law.shift = VectorXd::Zero(2 * d);
  law.cov = MatrixXd::Zero(2 * d, 2 * d);
  for (Eigen::Index j = 0; j < d; ++j) {
    const double s2 = spec.sigma(j) * spec.sigma(j);
    law.cov(j, j) = 2.0 * s2 * t;
    law.cov(j, d + j) = law.cov(d + j, j) = s2 * t * t;
    law.cov(d + j, d + j) = 2.0 / 3.0 * s2 * t * t * t;
  }
  return law;
}

KernelPtr kolmogorov_kernel(const KolmogorovSpec& spec) {
  spec.validate();
  std::string id = "kolmogorov:";
  for (Eigen::Index j = 0; j < spec.sigma.size(); ++j) id += (j ? "," : "") + fmt(spec.sigma(j));
  return std::make_shared<GaussianKernel>(
      id, euclidean_space(int(2 * spec.sigma.size())),
      [spec](double t) { return kolmogorov_law(spec, t); }, false);
}

KernelPtr euclidean_heat_kernel(int d) {
  return std::make_shared<GaussianKernel>(
      "euclidean:" + std::to_string(d), euclidean_space(d),
      [d](double t) {
        return GaussianLaw{MatrixXd::Identity(d, d), VectorXd::Zero(d),
                           2.0 * t * MatrixXd::Identity(d, d)};
      },
      true);
}

Potential quadratic_potential(double k) {
  return {"quad" + fmt(k), [k](double x) { return k * x; }, k, std::nullopt};
}

Potential zero_potential() { return {"zero", [](double) { return 0.0; }, 0.0, 0.0}; }

Potential quartic_potential() {
  // V = x^4/4: |V''| = 3x^2 <= 3(1 + x^3) fails for x < 0, so no growth constant.
  return {"quartic", [](double x) { return x * x * x; }, std::nullopt, std::nullopt};
}

void KineticFPSpec::validate() const {
  require(!potentials.empty(), "kinetic spec needs at least one coordinate");
  for (const auto& p : potentials) require(bool(p.grad), "potential " + p.id + " has no gradient");
  if (convexity) {
    const auto [m, M] = *convexity;
    require(m > 0.0 && m <= M, "convexity bounds need 0 < m <= M");
    require(std::sqrt(M) - std::sqrt(m) <= 1.0, "convexity bounds need sqrt(M) - sqrt(m) <= 1");
  }
}

GaussianLaw kinetic_linear_law(const KineticFPSpec& spec, double t) {
  spec.validate();
  const int d = spec.d();
  GaussianLaw law{MatrixXd::Zero(2 * d, 2 * d), VectorXd::Zero(2 * d), MatrixXd::Zero(2 * d, 2 * d)};
  for (int j = 0; j < d; ++j) {
    const auto& pot = spec.potentials[j];
    if (!pot.quadratic) throw UnsupportedError("potential " + pot.id + " is not quadratic");
    Eigen::Matrix2d B;
    B << 0.0, 1.0, -*pot.quadratic, -1.0;
    const Eigen::Matrix2d phi = (B * t).exp();
    Eigen::Matrix4d C = Eigen::Matrix4d::Zero();
    C.topLeftCorner<2, 2>() = -B;
    C(1, 3) = 1.0;  // noise enters the velocity only
    C.bottomRightCorner<2, 2>() = B.transpose();
    const Eigen::Matrix4d F = (C * t).exp();
    const Eigen::Matrix2d sigma = F.bottomRightCorner<2, 2>().transpose() * F.topRightCorner<2, 2>();
    const int idx[2] = {j, d + j};
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        law.M(idx[a], idx[b]) = phi(a, b);
        law.cov(idx[a], idx[b]) = 0.5 * (sigma(a, b) + sigma(b, a));
      }
  }
  return law;
}

namespace {

std::string kinetic_id(const char* prefix, const KineticFPSpec& spec) {
  std::string id = prefix;
  for (int j = 0; j < spec.d(); ++j) id += (j ? "," : "") + spec.potentials[j].id;
  return id;
}

class KineticKernel : public MarkovKernel {
 public:
  KineticKernel(KineticFPSpec spec, double dt)
      : MarkovKernel(kinetic_id("kinetic:", spec), euclidean_space(2 * spec.d())),
        spec_(std::move(spec)), dt_(dt) {
    spec_.validate();
    require(dt > 0.0, "dt must be positive");
  }

  Point sample(const Point& start, double t, RandomStream& rng) const override {
    require(start.size() == dimension(), "start point has wrong dimension for " + id_);
    if (t == 0.0) return start;
    const int d = spec_.d();
    const int steps = step_count(t, dt_);
    const double h = t / steps, sh = std::sqrt(h);
    Point z = start;
    for (int s = 0; s < steps; ++s) {
      for (int j = 0; j < d; ++j) {
        const double x = z(j), y = z(d + j);
        z(j) = x + y * h;
        z(d + j) = y + sh * rng.normal() - (spec_.potentials[j].grad(x) + y) * h;
        if (!(std::abs(z(j)) <= 1e8 && std::abs(z(d + j)) <= 1e8)) {
          throw NumericError("kinetic path blow-up under potential " + spec_.potentials[j].id,
                             std::max(std::abs(z(j)), std::abs(z(d + j))));
        }
      }
    }
    return z;
  }
  bool frame_generates() const override { return false; }

 private:
  KineticFPSpec spec_;
  double dt_;
};

}  // namespace

KernelPtr kinetic_fp_kernel(const KineticFPSpec& spec, double dt) {
  return std::make_shared<KineticKernel>(spec, dt);
}

KernelPtr kinetic_linear_kernel(const KineticFPSpec& spec) {
  spec.validate();
  for (const auto& p : spec.potentials)
    if (!p.quadratic) throw UnsupportedError("potential " + p.id + " is not quadratic");
  return std::make_shared<GaussianKernel>(
      kinetic_id("kinetic-linear:", spec), euclidean_space(2 * spec.d()),
      [spec](double t) { return kinetic_linear_law(spec, t); }, false);
}

namespace {

MetricSpace carnot_space(int n, const std::vector<MatrixXd>& A) {
  if (n == 1 && A.size() == 1 && (A[0] - symplectic_block()).cwiseAbs().maxCoeff() == 0.0) {
    return heisenberg3_space();
  }
  const int dim = 2 * n + int(A.size());
  return {"carnot:" + std::to_string(n) + ":" + std::to_string(A.size()), dim,
          [](const Point&, const Point&) -> double {
            throw UnsupportedError("CC distance is only implemented on heisenberg3");
          }};
}

}  // namespace

CarnotKernel::CarnotKernel(std::string id, int n, std::vector<MatrixXd> A, double dt)
    : MarkovKernel(std::move(id), carnot_space(n, A)), n_(n), m_(int(A.size())), A_(std::move(A)), dt_(dt) {
  require(dt > 0.0, "dt must be positive");
  TransverseGroupSpec spec{"", n_, m_, A_, {}};
  const auto rep = validate_spec(spec);
  require(rep.ok(), "invalid Carnot family: " + rep.summary());
  for (int l = 0; l < m_; ++l)
    for (int i = 0; i < 2 * n_; ++i)
      for (int j = 0; j < 2 * n_; ++j)
        if (A_[l](i, j) != 0.0) entries_.push_back({l, i, j, A_[l](i, j)});
}

std::vector<Point> CarnotKernel::sample_path(const Point& start, const std::vector<double>& times,
                                             RandomStream& rng) const {
  require(start.size() == dimension(), "start point has wrong dimension for " + id_);
  const int h2 = 2 * n_;
  std::vector<double> x(start.data(), start.data() + h2);
  std::vector<double> y(start.data() + h2, start.data() + h2 + m_);
  std::vector<double> dx(h2);
  std::vector<Point> out;
  out.reserve(times.size());
  double now = 0.0;
  for (double t : times) {
    require(t >= now, "sample times must be nondecreasing");
    if (t > now) {
      const int steps = step_count(t - now, dt_);
      const double scale = std::sqrt(2.0 * (t - now) / steps);
      for (int s = 0; s < steps; ++s) {
        for (int i = 0; i < h2; ++i) dx[i] = scale * rng.normal();
        // y_l -= 1/2 <A_l x, dx>: the exact group increment of a straight step.
        for (const auto& e : entries_) y[e.l] -= 0.5 * e.a * x[e.j] * dx[e.i];
        for (int i = 0; i < h2; ++i) x[i] += dx[i];
      }
    }
    now = t;
    Point p(h2 + m_);
    for (int i = 0; i < h2; ++i) p(i) = x[i];
    for (int l = 0; l < m_; ++l) p(h2 + l) = y[l];
    out.push_back(std::move(p));
  }
  return out;
}

Point CarnotKernel::sample(const Point& start, double t, RandomStream& rng) const {
  return sample_path(start, {t}, rng).front();
}

Point CarnotKernel::multiply(const Point& g, const Point& h) const {
  const int h2 = 2 * n_;
  Point out = g + h;
  for (const auto& e : entries_) out(h2 + e.l) -= 0.5 * e.a * g(e.j) * h(e.i);
  return out;
}

Point CarnotKernel::flow(const Point& p, int k, double s) const {
  Point e = Point::Zero(dimension());
  e(k) = s;
  return multiply(p, e);
}

MatrixXd CarnotKernel::frame(const Point& p) const {
  const int h2 = 2 * n_;
  MatrixXd f = MatrixXd::Zero(dimension(), h2);
  f.topRows(h2).setIdentity();
  for (const auto& e : entries_) f(h2 + e.l, e.i) -= 0.5 * e.a * p(e.j);
  return f;
}

KernelPtr carnot_step2_kernel(const std::vector<MatrixXd>& A, int n, int m, double dt) {
  require(int(A.size()) == m, "carnot kernel needs m matrices");
  return std::make_shared<CarnotKernel>("carnot:" + std::to_string(n) + ":" + std::to_string(m), n, A, dt);
}

KernelPtr heisenberg_kernel(double dt) {
  return std::make_shared<CarnotKernel>("heisenberg3", 1, std::vector<MatrixXd>{symplectic_block()}, dt);
}

Eigen::Matrix3d so3_exp(const Eigen::Matrix3d& a) {
  const double th2 = a(2, 1) * a(2, 1) + a(0, 2) * a(0, 2) + a(1, 0) * a(1, 0);
  const double th = std::sqrt(th2);
  double s, c;
  if (th < 1e-4) {
    s = 1.0 - th2 / 6.0 + th2 * th2 / 120.0;
    c = 0.5 - th2 / 24.0 + th2 * th2 / 720.0;
  } else {
    s = std::sin(th) / th;
    c = (1.0 - std::cos(th)) / th2;
  }
  return Eigen::Matrix3d::Identity() + s * a + c * a * a;
}

namespace {

Eigen::Matrix4d hodge(const Eigen::Matrix4d& a) {
  Eigen::Matrix4d h = Eigen::Matrix4d::Zero();
  h(0, 1) = a(2, 3);
  h(0, 2) = -a(1, 3);
  h(0, 3) = a(1, 2);
  h(1, 2) = a(0, 3);
  h(1, 3) = -a(0, 2);
  h(2, 3) = a(0, 1);
  return h - h.transpose().eval();
}

// exp of B with B^2 = -theta^2 I.
template <typename M>
M quadratic_exp(const M& b, double th2) {
  const double th = std::sqrt(th2);
  const double s = th < 1e-4 ? 1.0 - th2 / 6.0 + th2 * th2 / 120.0 : std::sin(th) / th;
  const double c = th < 1e-4 ? 1.0 - th2 / 2.0 + th2 * th2 / 24.0 : std::cos(th);
  return c * M::Identity() + s * b;
}

}  // namespace

Eigen::Matrix4d so4_exp(const Eigen::Matrix4d& a) {
  const Eigen::Matrix4d star = hodge(a);
  const Eigen::Matrix4d ap = 0.5 * (a + star), am = 0.5 * (a - star);
  return quadratic_exp(ap, ap.squaredNorm() / 4.0) * quadratic_exp(am, am.squaredNorm() / 4.0);
}

Eigen::Matrix2cd su2_exp(const Eigen::Matrix2cd& a) {
  const double th2 = std::max(0.0, a.determinant().real());
  return quadratic_exp(a, th2);
}

Point flatten(const Eigen::MatrixXcd& g, bool complex) {
  const Eigen::Index n = g.size();
  Point p(complex ? 2 * n : n);
  for (Eigen::Index i = 0; i < n; ++i) {
    p(i) = g.data()[i].real();
    if (complex) p(n + i) = g.data()[i].imag();
  }
  return p;
}

Eigen::MatrixXcd unflatten(const Point& p, int size, bool complex) {
  const Eigen::Index n = Eigen::Index(size) * size;
  require(p.size() == (complex ? 2 * n : n), "flattened matrix has wrong length");
  Eigen::MatrixXcd g(size, size);
  for (Eigen::Index i = 0; i < n; ++i)
    g.data()[i] = std::complex<double>(p(i), complex ? p(n + i) : 0.0);
  return g;
}

Eigen::MatrixXcd polar_project(const Eigen::MatrixXcd& g) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(g, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

namespace {

template <typename Mat>
struct GroupTraits;

template <>
struct GroupTraits<Eigen::Matrix3d> {
  static constexpr bool complex = false;
  static Eigen::Matrix3d exp(const Eigen::Matrix3d& a) { return so3_exp(a); }
  static Eigen::Matrix3d from(const Eigen::MatrixXcd& m) { return m.real(); }
};

template <>
struct GroupTraits<Eigen::Matrix4d> {
  static constexpr bool complex = false;
  static Eigen::Matrix4d exp(const Eigen::Matrix4d& a) { return so4_exp(a); }
  static Eigen::Matrix4d from(const Eigen::MatrixXcd& m) { return m.real(); }
};

template <>
struct GroupTraits<Eigen::Matrix2cd> {
  static constexpr bool complex = true;
  static Eigen::Matrix2cd exp(const Eigen::Matrix2cd& a) { return su2_exp(a); }
  static Eigen::Matrix2cd from(const Eigen::MatrixXcd& m) { return m; }
};

template <typename Mat>
class MatrixWalkKernel : public MarkovKernel {
  using Traits = GroupTraits<Mat>;
  static constexpr int N = Mat::RowsAtCompileTime;

 public:
  MatrixWalkKernel(std::string id, const std::vector<Eigen::MatrixXcd>& frame, double dt, DriftPolicy policy)
      : MarkovKernel(std::move(id), euclidean_space((Traits::complex ? 2 : 1) * N * N)), dt_(dt), policy_(policy) {
    require(dt > 0.0, "dt must be positive");
    require(!frame.empty(), "walk needs a nonempty frame");
    for (const auto& e : frame) {
      require(e.rows() == N && e.cols() == N, "frame matrix has wrong size");
      require(skew_residual(e) <= 1e-12, "frame element is not in the Lie algebra");
      if (!Traits::complex) require(e.imag().cwiseAbs().maxCoeff() == 0.0, "frame element must be real");
      if (Traits::complex) require(std::abs(e.trace()) <= 1e-12, "su(2) frame element must be traceless");
      frame_.push_back(Traits::from(e));
    }
  }

  Mat to_matrix(const Point& p) const { return Traits::from(unflatten(p, N, Traits::complex)); }
  Point to_point(const Mat& g) const { return flatten(Eigen::MatrixXcd(g.template cast<std::complex<double>>()), Traits::complex); }

  std::vector<Point> sample_path(const Point& start, const std::vector<double>& times,
                                 RandomStream& rng) const override {
    require(start.size() == dimension(), "start point has wrong dimension for " + id_);
    Mat g = to_matrix(start);
    std::vector<Point> out;
    double now = 0.0;
    long step_index = 0;
    for (double t : times) {
      require(t >= now, "sample times must be nondecreasing");
      if (t > now) {
        const int steps = step_count(t - now, dt_);
        const double scale = std::sqrt(2.0 * (t - now) / steps);
        for (int s = 0; s < steps; ++s) {
          Mat x = Mat::Zero();
          for (const auto& e : frame_) x += (scale * rng.normal()) * e;
          g = g * Traits::exp(x);
          if (++step_index % 100 == 0) check_drift(g);
        }
      }
      now = t;
      out.push_back(to_point(g));
    }
    return out;
  }

  Point sample(const Point& start, double t, RandomStream& rng) const override {
    return sample_path(start, {t}, rng).front();
  }

  bool left_invariant() const override { return true; }
  Point identity() const override { return to_point(Mat::Identity()); }
  Point multiply(const Point& g, const Point& h) const override {
    return to_point(to_matrix(g) * to_matrix(h));
  }
  int frame_size() const override { return int(frame_.size()); }
  Point flow(const Point& p, int k, double s) const override {
    return to_point(to_matrix(p) * Traits::exp(s * frame_[k]));
  }
  MatrixXd frame(const Point& p) const override {
    const Mat g = to_matrix(p);
    MatrixXd f(dimension(), frame_size());
    for (int k = 0; k < frame_size(); ++k) f.col(k) = to_point(g * frame_[k]);
    return f;
  }

 private:
  void check_drift(Mat& g) const {
    const double res = unitarity_residual(g);
    if (res <= 1e-12) return;
    if (res > 1e-8 && policy_ == DriftPolicy::Strict) {
      throw NumericError("group walk " + id_ + " drifted off the group", res);
    }
    g = Traits::from(polar_project(Eigen::MatrixXcd(g.template cast<std::complex<double>>())));
  }

  std::vector<Mat> frame_;
  double dt_;
  DriftPolicy policy_;
};

std::vector<Eigen::MatrixXcd> complexify(const std::vector<MatrixXd>& ms) {
  std::vector<Eigen::MatrixXcd> out;
  for (const auto& m : ms) out.push_back(m.cast<std::complex<double>>());
  return out;
}

}  // namespace

KernelPtr lie_group_walk_kernel(MatrixGroup group, const std::vector<Eigen::MatrixXcd>& frame,
                                double dt, DriftPolicy policy, std::string id) {
  switch (group) {
    case MatrixGroup::SO3:
      return std::make_shared<MatrixWalkKernel<Eigen::Matrix3d>>(id.empty() ? "so3-walk" : id, frame, dt, policy);
    case MatrixGroup::SO4:
      return std::make_shared<MatrixWalkKernel<Eigen::Matrix4d>>(id.empty() ? "so4-walk" : id, frame, dt, policy);
    case MatrixGroup::SU2:
      return std::make_shared<MatrixWalkKernel<Eigen::Matrix2cd>>(id.empty() ? "su2-walk" : id, frame, dt, policy);
  }
  throw InputError("unknown matrix group");
}

KernelPtr so3_kernel(double dt) {
  Eigen::Matrix3d x1 = Eigen::Matrix3d::Zero(), x2 = Eigen::Matrix3d::Zero();
  x1(0, 1) = 1; x1(1, 0) = -1;
  x2(0, 2) = 1; x2(2, 0) = -1;
  return lie_group_walk_kernel(MatrixGroup::SO3, complexify({x1, x2}), dt,
                               DriftPolicy::Reorthonormalize, "so3");
}

KernelPtr so4_kernel(double dt) {
  const auto sp = so4_split();
  const double c = std::pow(2.0, -0.25);
  return lie_group_walk_kernel(MatrixGroup::SO4,
                               complexify({c * sp.X[0], c * sp.X[1], c * sp.Z[0], c * sp.Z[1]}),
                               dt, DriftPolicy::Reorthonormalize, "so4");
}

KernelPtr model_space_kernel(double rho, double dt) {
  const auto cls = classify_model_space(rho);
  if (cls.tag == ModelTag::Heisenberg) return heisenberg_kernel(dt);
  if (cls.tag == ModelTag::SL2Cover) {
    throw UnsupportedError("model space with rho < 0 (SL(2) cover) is not simulated");
  }
  const auto e = su2_basis();
  const double s = std::sqrt(rho);
  return lie_group_walk_kernel(MatrixGroup::SU2, {s * e[0], s * e[1]}, dt,
                               DriftPolicy::Reorthonormalize, "model:" + fmt(rho));
}

namespace {

class TensorKernel : public MarkovKernel {
 public:
  explicit TensorKernel(std::vector<KernelPtr> parts)
      : MarkovKernel(make_id(parts), make_space(parts)), parts_(std::move(parts)) {
    int off = 0, obs = 0, fr = 0;
    for (const auto& p : parts_) {
      offsets_.push_back(off);
      obs_offsets_.push_back(obs);
      frame_offsets_.push_back(fr);
      off += p->dimension();
      obs += p->observed_dimension();
      fr += p->frame_size();
    }
    observed_ = obs;
    frames_ = fr;
  }

  int observed_dimension() const override { return observed_; }
  bool analytic() const override {
    return std::all_of(parts_.begin(), parts_.end(), [](const KernelPtr& k) { return k->analytic(); });
  }

  std::vector<Point> sample_path(const Point& start, const std::vector<double>& times,
                                 RandomStream& rng) const override {
    require(start.size() == dimension(), "start point has wrong dimension for " + id_);
    const std::uint64_t base = rng.next_u64();
    std::vector<Point> out(times.size(), Point(dimension()));
    for (std::size_t i = 0; i < parts_.size(); ++i) {
      RandomStream sub = rng.split(base + i);
      const auto path = parts_[i]->sample_path(part(start, i), times, sub);
      for (std::size_t k = 0; k < times.size(); ++k)
        out[k].segment(offsets_[i], parts_[i]->dimension()) = path[k];
    }
    return out;
  }
  Point sample(const Point& start, double t, RandomStream& rng) const override {
    return sample_path(start, {t}, rng).front();
  }
  Point observe(const Point& state) const override {
    Point o(observed_);
    for (std::size_t i = 0; i < parts_.size(); ++i)
      o.segment(obs_offsets_[i], parts_[i]->observed_dimension()) = parts_[i]->observe(part(state, i));
    return o;
  }
  bool observes_state() const override {
    return std::all_of(parts_.begin(), parts_.end(), [](const KernelPtr& k) { return k->observes_state(); });
  }
  std::optional<GaussianLaw> gaussian_law(double t) const override {
    GaussianLaw law{MatrixXd::Zero(dimension(), dimension()), VectorXd::Zero(dimension()),
                    MatrixXd::Zero(dimension(), dimension())};
    for (std::size_t i = 0; i < parts_.size(); ++i) {
      const auto l = parts_[i]->gaussian_law(t);
      if (!l) return std::nullopt;
      const int o = offsets_[i], d = parts_[i]->dimension();
      law.M.block(o, o, d, d) = l->M;
      law.shift.segment(o, d) = l->shift;
      law.cov.block(o, o, d, d) = l->cov;
    }
    return law;
  }
  bool left_invariant() const override {
    return std::all_of(parts_.begin(), parts_.end(), [](const KernelPtr& k) { return k->left_invariant(); });
  }
  Point identity() const override {
    Point e(dimension());
    for (std::size_t i = 0; i < parts_.size(); ++i) e.segment(offsets_[i], parts_[i]->dimension()) = parts_[i]->identity();
    return e;
  }
  Point multiply(const Point& g, const Point& h) const override {
    Point o(dimension());
    for (std::size_t i = 0; i < parts_.size(); ++i)
      o.segment(offsets_[i], parts_[i]->dimension()) = parts_[i]->multiply(part(g, i), part(h, i));
    return o;
  }
  int frame_size() const override { return frames_; }
  Point flow(const Point& p, int k, double s) const override {
    std::size_t i = parts_.size() - 1;
    while (frame_offsets_[i] > k) --i;
    Point q = p;
    q.segment(offsets_[i], parts_[i]->dimension()) = parts_[i]->flow(part(p, i), k - frame_offsets_[i], s);
    return q;
  }
  MatrixXd frame(const Point& p) const override {
    MatrixXd f = MatrixXd::Zero(dimension(), frames_);
    for (std::size_t i = 0; i < parts_.size(); ++i)
      f.block(offsets_[i], frame_offsets_[i], parts_[i]->dimension(), parts_[i]->frame_size()) = parts_[i]->frame(part(p, i));
    return f;
  }
  bool frame_generates() const override {
    return std::all_of(parts_.begin(), parts_.end(), [](const KernelPtr& k) { return k->frame_generates(); });
  }

 private:
  static std::string make_id(const std::vector<KernelPtr>& parts) {
    require(!parts.empty(), "tensor product of zero kernels");
    std::string id = "product:[";
    for (std::size_t i = 0; i < parts.size(); ++i) id += (i ? "," : "") + parts[i]->id();
    return id + "]";
  }
  static MetricSpace make_space(const std::vector<KernelPtr>& parts) {
    std::vector<MetricSpace> spaces;
    for (const auto& p : parts) spaces.push_back(p->space());
    return ProductMetricSpace(spaces).as_space();
  }
  Point part(const Point& x, std::size_t i) const {
    return x.segment(offsets_[i], parts_[i]->dimension());
  }

  std::vector<KernelPtr> parts_;
  std::vector<int> offsets_, obs_offsets_, frame_offsets_;
  int observed_ = 0, frames_ = 0;
};

class PushforwardKernel : public MarkovKernel {
 public:
  PushforwardKernel(KernelPtr base, std::function<Point(const Point&)> map, int observed, std::string id)
      : MarkovKernel(std::move(id), base->space()), base_(std::move(base)), map_(std::move(map)), observed_(observed) {}

  int observed_dimension() const override { return observed_; }
  bool analytic() const override { return false; }
  Point sample(const Point& start, double t, RandomStream& rng) const override { return base_->sample(start, t, rng); }
  std::vector<Point> sample_path(const Point& start, const std::vector<double>& times, RandomStream& rng) const override {
    return base_->sample_path(start, times, rng);
  }
  Point observe(const Point& state) const override { return map_(base_->observe(state)); }
  bool observes_state() const override { return false; }
  bool left_invariant() const override { return base_->left_invariant(); }
  Point identity() const override { return base_->identity(); }
  Point multiply(const Point& g, const Point& h) const override { return base_->multiply(g, h); }
  int frame_size() const override { return base_->frame_size(); }
  Point flow(const Point& p, int k, double s) const override { return base_->flow(p, k, s); }
  MatrixXd frame(const Point& p) const override { return base_->frame(p); }
  bool frame_generates() const override { return base_->frame_generates(); }

 private:
  KernelPtr base_;
  std::function<Point(const Point&)> map_;
  int observed_;
};

}  // namespace

KernelPtr tensor_kernel(const std::vector<KernelPtr>& kernels) {
  require(!kernels.empty(), "tensor product of zero kernels");
  if (kernels.size() == 1) return kernels.front();
  return std::make_shared<TensorKernel>(kernels);
}

KernelPtr pushforward_kernel(KernelPtr base, std::function<Point(const Point&)> map,
                             int observed_dimension, std::string id) {
  return std::make_shared<PushforwardKernel>(std::move(base), std::move(map), observed_dimension, std::move(id));
}

KernelPtr so4_from_model_pair(double dt) {
  const double rho = std::sqrt(2.0);
  auto base = std::make_shared<TensorKernel>(
      std::vector<KernelPtr>{model_space_kernel(rho, dt), model_space_kernel(rho, dt)});
  const auto sp = so4_split();
  const Eigen::Matrix4d tu = sp.intertwiner_u, tv = sp.intertwiner_v;
  auto map = [tu, tv](const Point& p) {
    const Eigen::Matrix2cd g1 = unflatten(p.head(8), 2, true);
    const Eigen::Matrix2cd g2 = unflatten(p.tail(8), 2, true);
    const Eigen::Matrix4d h = tu * realify(g1) * tu.transpose() * tv * realify(g2) * tv.transpose();
    return flatten(h.cast<std::complex<double>>(), false);
  };
  return pushforward_kernel(base, map, 16, "so4-from-model");
}

KernelPtr carnot_from_heisenberg_product(const Submersion& sub, double dt) {
  require(sub.step2, "coordinate map needs a step-2 target");
  const auto n = sub.blocks.lambda.rows();
  std::vector<KernelPtr> parts(std::size_t(n), heisenberg_kernel(dt));
  KernelPtr base = n == 1 ? parts.front() : std::make_shared<TensorKernel>(parts);
  const int out = int(2 * n + sub.blocks.lambda.cols());
  return pushforward_kernel(base, [sub](const Point& p) { return sub.map_point(p); }, out,
                            "carnot-from-heisenberg");
}

namespace {

std::vector<std::string> split_list(const std::string& s) {
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

double to_real(const std::string& s, const std::string& ctx) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw InputError("bad number '" + s + "' in kernel id '" + ctx + "'");
}

Potential parse_potential(const std::string& s, const std::string& ctx) {
  if (s == "zero") return zero_potential();
  if (s == "quartic") return quartic_potential();
  if (s.rfind("quad", 0) == 0) return quadratic_potential(to_real(s.substr(4), ctx));
  throw InputError("unknown potential '" + s + "' in kernel id '" + ctx + "'");
}

}  // namespace

KernelPtr make_kernel(const std::string& id, double dt) {
  if (id == "heisenberg3") return heisenberg_kernel(dt);
  if (id == "so3") return so3_kernel(dt);
  if (id == "so4") return so4_kernel(dt);
  if (id == "so4-from-model") return so4_from_model_pair(dt);
  if (id == "su2-full") {
    const auto e = su2_basis();
    return lie_group_walk_kernel(MatrixGroup::SU2, {e[0], e[1], e[2]}, dt,
                                 DriftPolicy::Reorthonormalize, "su2-full");
  }
  if (id.rfind("product:[", 0) == 0 && id.back() == ']') {
    std::vector<KernelPtr> parts;
    for (const auto& p : split_list(id.substr(9, id.size() - 10))) parts.push_back(make_kernel(p, dt));
    return tensor_kernel(parts);
  }
  const auto colon = id.find(':');
  const std::string head = id.substr(0, colon);
  const std::string rest = colon == std::string::npos ? "" : id.substr(colon + 1);
  if (head == "kolmogorov") {
    const auto parts = split_list(rest);
    require(!parts.empty(), "kolmogorov kernel needs sigma values");
    KolmogorovSpec spec{VectorXd(Eigen::Index(parts.size()))};
    for (std::size_t i = 0; i < parts.size(); ++i) spec.sigma(Eigen::Index(i)) = to_real(parts[i], id);
    return kolmogorov_kernel(spec);
  }
  if (head == "euclidean") return euclidean_heat_kernel(int(to_real(rest, id)));
  if (head == "model") return model_space_kernel(to_real(rest, id), dt);
  if (head == "kinetic" || head == "kinetic-linear") {
    KineticFPSpec spec;
    for (const auto& p : split_list(rest)) spec.potentials.push_back(parse_potential(p, id));
    return head == "kinetic" ? kinetic_fp_kernel(spec, dt) : kinetic_linear_kernel(spec);
  }
  if (head == "carnot") {
    const auto spec = make_transverse_spec(rest);
    for (const auto& r : spec.R)
      require(r.cwiseAbs().maxCoeff() == 0.0, "carnot kernel needs R = 0 (step-2 group)");
    auto k = std::make_shared<CarnotKernel>(id, spec.n, spec.A, dt);
    return k;
  }
  if (head == "carnot-from-heisenberg") {
    return carnot_from_heisenberg_product(build_submersion(make_transverse_spec(rest)), dt);
  }
  throw InputError("unknown kernel id '" + id + "'");
}

}  // namespace hypo
