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

#include "hypo/inequality.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include <Eigen/Eigenvalues>

#include "hypo/estimate.hpp"
#include "hypo/transport.hpp"

namespace hypo {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

double fd_step(const CheckContext& ctx) {
  if (ctx.fd_step > 0.0) return ctx.fd_step;
  return ctx.kernel->analytic() ? 1e-5 : 1e-3;
}

double value_at(const MarkovKernel& k, const TestFunction& f, const Point& state) {
  return f(k.observes_state() ? state : k.observe(state));
}

Point fd_frame_gradient(const MarkovKernel& k, const TestFunction& f, const Point& p, double h) {
  Point g(k.frame_size());
  for (int i = 0; i < k.frame_size(); ++i) {
    g(i) = (value_at(k, f, k.flow(p, i, h)) - value_at(k, f, k.flow(p, i, -h))) / (2.0 * h);
  }
  return g;
}

// Frame gradient without the cross-check, for per-path use.
Point frame_gradient(const MarkovKernel& k, const TestFunction& f, const Point& p) {
  if (f.gradient && k.observes_state()) return k.frame(p).transpose() * f.gradient(p);
  return fd_frame_gradient(k, f, p, 1e-5 * (1.0 + p.norm()));
}

MatrixXd form_or_identity(const FormFn& form, double t, int k) {
  if (!form) return MatrixXd::Identity(k, k);
  MatrixXd m = form(t);
  require(m.cols() == k, "gradient form has the wrong number of columns");
  return m;
}

struct RowSpec {
  std::string inequality;
  std::function<double(const VectorXd&, double)> lhs;
  std::function<double(const VectorXd&, double)> rhs;
  bool informational = false;
};

// One check over several functions and report times, sharing one simulation.
struct Plan {
  Point point;
  std::vector<Point> starts;
  std::vector<double> sim_times;
  std::vector<double> report_times;
  int size = 0;
  bool needs_positive = false;
  std::function<void(const TestFunction&, const std::vector<Point>& ends, std::size_t r, double* out)> fill;
  std::function<std::optional<VectorXd>(const TestFunction&, std::size_t r)> exact;
  std::vector<RowSpec> rows;
};

std::vector<InequalityReport> run_plan(const CheckContext& ctx, const std::vector<TestFunction>& fs,
                                       const Plan& plan) {
  const MarkovKernel& k = *ctx.kernel;
  const std::size_t nr = plan.report_times.size();
  std::vector<std::vector<std::optional<Estimate>>> est(fs.size(), std::vector<std::optional<Estimate>>(nr));
  std::vector<std::string> errors(fs.size());
  std::vector<std::size_t> mc;
  for (std::size_t fi = 0; fi < fs.size(); ++fi) {
    try {
      if (plan.needs_positive && !fs[fi].positive) {
        throw InputError("function " + fs[fi].id + " is not flagged positive");
      }
      bool exact = bool(plan.exact) && fs[fi].ridge.has_value();
      for (std::size_t r = 0; exact && r < nr; ++r) {
        auto v = plan.exact(fs[fi], r);
        if (!v) {
          exact = false;
          break;
        }
        est[fi][r] = Estimate::exact_value(*v);
      }
      if (!exact) mc.push_back(fi);
    } catch (const std::exception& e) {
      errors[fi] = e.what();
    }
  }
  if (!mc.empty()) {
    SimulationRequest req;
    req.starts = plan.starts;
    req.times = plan.sim_times;
    req.paths = ctx.paths;
    req.key = ctx.key;
    req.groups.assign(mc.size() * nr, plan.size);
    const int size = plan.size;
    auto observer = [&](const std::vector<Point>& ends, double* out) {
      for (std::size_t j = 0; j < mc.size(); ++j)
        for (std::size_t r = 0; r < nr; ++r) plan.fill(fs[mc[j]], ends, r, out + (j * nr + r) * size);
    };
    try {
      const auto sims = simulate(k, req, observer);
      for (std::size_t j = 0; j < mc.size(); ++j)
        for (std::size_t r = 0; r < nr; ++r) est[mc[j]][r] = sims[j * nr + r];
    } catch (const std::exception& e) {
      for (std::size_t fi : mc) errors[fi] = e.what();
    }
  }
  std::vector<InequalityReport> out;
  for (std::size_t fi = 0; fi < fs.size(); ++fi) {
    for (std::size_t r = 0; r < nr; ++r) {
      const double t = plan.report_times[r];
      for (const auto& row : plan.rows) {
        if (!errors[fi].empty() || !est[fi][r]) {
          auto rep = error_report(row.inequality, k.id(), fs[fi].id, plan.point, t,
                                  errors[fi].empty() ? "no estimate" : errors[fi]);
          rep.job = ctx.job;
          rep.informational = row.informational;
          out.push_back(rep);
          continue;
        }
        const Estimate& e = *est[fi][r];
        InequalityReport rep;
        rep.job = ctx.job;
        rep.inequality = row.inequality;
        rep.kernel = k.id();
        rep.function = fs[fi].id;
        rep.point = plan.point;
        rep.t = t;
        rep.lhs = row.lhs(e.mean, t);
        rep.rhs = row.rhs(e.mean, t);
        rep.se_lhs = e.stderr_of([&](const VectorXd& m) { return row.lhs(m, t); });
        rep.se_rhs = e.stderr_of([&](const VectorXd& m) { return row.rhs(m, t); });
        rep.informational = row.informational;
        Verdict v = ctx.verdict;
        if (e.exact) {
          v.tolerance = std::max(v.tolerance, 1e-12 * std::max({1.0, std::abs(rep.lhs), std::abs(rep.rhs)}));
          rep.note = "exact";
        } else {
          rep.note = "mc paths=" + std::to_string(e.n);
        }
        if (row.informational) rep.note += "; informational";
        finalize(rep, v);
        out.push_back(rep);
      }
    }
  }
  return out;
}

// Stencil: [p, flow(+h, k), flow(-h, k) ..., then the Laplacian pair if asked].
std::vector<Point> stencil(const MarkovKernel& k, const Point& p, double h, double hl, bool laplacian) {
  std::vector<Point> s{p};
  for (int i = 0; i < k.frame_size(); ++i) {
    s.push_back(k.flow(p, i, h));
    s.push_back(k.flow(p, i, -h));
  }
  if (laplacian) {
    for (int i = 0; i < k.frame_size(); ++i) {
      s.push_back(k.flow(p, i, hl));
      s.push_back(k.flow(p, i, -hl));
    }
  }
  return s;
}

void fill_fd_gradient(const MarkovKernel& k, const TestFunction& f, const Point* ends, double h, double* out) {
  for (int i = 0; i < k.frame_size(); ++i)
    out[i] = (value_at(k, f, ends[1 + 2 * i]) - value_at(k, f, ends[2 + 2 * i])) / (2.0 * h);
}

std::optional<GaussianLaw> exact_law(const MarkovKernel& k, double t) {
  if (!k.observes_state()) return std::nullopt;
  return k.gaussian_law(t);
}

double quad(const MatrixXd& Q, const VectorXd& g) { return g.dot(Q * g); }

void check_times(const std::vector<double>& times) {
  require(!times.empty(), "check needs at least one time");
  for (std::size_t i = 0; i < times.size(); ++i) {
    require(times[i] > 0.0, "check times must be positive");
    if (i) require(times[i] > times[i - 1], "check times must be increasing");
  }
}

}  // namespace

Point horizontal_gradient(const MarkovKernel& kernel, const TestFunction& f, const Point& p) {
  const Point fd = fd_frame_gradient(kernel, f, p, 1e-5 * (1.0 + p.norm()));
  if (!f.gradient || !kernel.observes_state()) return fd;
  const Point exact = kernel.frame(p).transpose() * f.gradient(p);
  const double diff = (exact - fd).norm();
  const double scale = std::max(exact.norm(), fd.norm());
  if (diff > 1e-4 * scale && diff > 1e-8) {
    throw ConsistencyError("exact and finite-difference gradients of " + f.id + " disagree (relative " +
                           std::to_string(diff / scale) + ")");
  }
  return exact;
}

MatrixXd kolmogorov_twisted_form(int d, double t) {
  MatrixXd Q = MatrixXd::Zero(2 * d, 2 * d);
  for (int i = 0; i < d; ++i) {
    Q(i, i) = 1.0;
    Q(i, d + i) = Q(d + i, i) = -0.5 * t;
    Q(d + i, d + i) = t * t / 3.0;  // t^2/4 + t^2/12
  }
  return Q;
}

double kolmogorov_twisted_gradient(const TestFunction& f, const Point& p, double t) {
  require(p.size() % 2 == 0, "Kolmogorov points have even dimension");
  const Point g = horizontal_gradient(*euclidean_heat_kernel(int(p.size())), f, p);
  return quad(kolmogorov_twisted_form(int(p.size() / 2), t), g);
}

MatrixXd kolmogorov_shear_map(int d, double t, double factor) {
  MatrixXd m = MatrixXd::Zero(d, 2 * d);
  for (int i = 0; i < d; ++i) {
    m(i, i) = 1.0;
    m(i, d + i) = factor * t;
  }
  return m;
}

MatrixXd kolmogorov_x_map(int d) {
  MatrixXd m = MatrixXd::Zero(d, 2 * d);
  m.leftCols(d).setIdentity();
  return m;
}

std::vector<InequalityReport> check_gradient_bound(const CheckContext& ctx, const std::vector<TestFunction>& fs,
                                                   const Point& point, const std::vector<double>& times, double p,
                                                   const ConstantFn& C, const FormFn& lhs_map,
                                                   const FormFn& rhs_map) {
  require(p >= 1.0, "gradient bound needs p >= 1");
  check_times(times);
  const MarkovKernel& k = *ctx.kernel;
  const int K = k.frame_size();
  const double h = fd_step(ctx);
  Plan plan;
  plan.point = point;
  plan.starts = stencil(k, point, h, 0.0, false);
  plan.sim_times = plan.report_times = times;
  plan.size = 1 + K;
  const std::size_t ns = plan.starts.size();
  std::vector<MatrixXd> L, R;
  for (double t : times) {
    L.push_back(form_or_identity(lhs_map, t, K));
    R.push_back(form_or_identity(rhs_map, t, K));
  }
  plan.fill = [&, ns, h](const TestFunction& f, const std::vector<Point>& ends, std::size_t r, double* out) {
    const Point* e = ends.data() + r * ns;
    out[0] = std::pow((R[r] * frame_gradient(k, f, e[0])).norm(), p);
    fill_fd_gradient(k, f, e, h, out + 1);
  };
  plan.exact = [&](const TestFunction& f, std::size_t r) -> std::optional<VectorXd> {
    const auto law = exact_law(k, times[r]);
    if (!law) return std::nullopt;
    const auto m = ridge_moments(*f.ridge, *law, point);
    VectorXd v(1 + K);
    const double scale = std::abs(f.ridge->amp) * (R[r] * f.ridge->w).norm();
    v(0) = scale == 0.0 ? 0.0 : std::pow(scale, p) * m.abs_dphi_p(p);
    v.tail(K) = m.grad;
    return v;
  };
  auto tindex = [&times](double t) {
    return std::size_t(std::find(times.begin(), times.end(), t) - times.begin());
  };
  plan.rows.push_back({"gradient_bound",
                       [&, K](const VectorXd& m, double t) { return (L[tindex(t)] * m.tail(K)).norm(); },
                       [&, p](const VectorXd& m, double t) { return C(t) * std::pow(std::max(0.0, m(0)), 1.0 / p); }});
  return run_plan(ctx, fs, plan);
}

std::vector<InequalityReport> check_reverse_poincare(const CheckContext& ctx, const std::vector<TestFunction>& fs,
                                                     const Point& point, const std::vector<double>& times,
                                                     const ConstantFn& C, const FormFn& Q) {
  check_times(times);
  const MarkovKernel& k = *ctx.kernel;
  const int K = k.frame_size();
  const double h = fd_step(ctx);
  Plan plan;
  plan.point = point;
  plan.starts = stencil(k, point, h, 0.0, false);
  plan.sim_times = plan.report_times = times;
  plan.size = 2 + K;
  const std::size_t ns = plan.starts.size();
  plan.fill = [&, ns, h](const TestFunction& f, const std::vector<Point>& ends, std::size_t r, double* out) {
    const Point* e = ends.data() + r * ns;
    const double f0 = value_at(k, f, e[0]);
    out[0] = f0;
    out[1] = f0 * f0;
    fill_fd_gradient(k, f, e, h, out + 2);
  };
  plan.exact = [&](const TestFunction& f, std::size_t r) -> std::optional<VectorXd> {
    const auto law = exact_law(k, times[r]);
    if (!law) return std::nullopt;
    const auto m = ridge_moments(*f.ridge, *law, point);
    VectorXd v(2 + K);
    v << m.pf, m.pf2, m.grad;
    return v;
  };
  plan.rows.push_back({"reverse_poincare",
                       [&, K](const VectorXd& m, double t) { return quad(form_or_identity(Q, t, K), m.tail(K)); },
                       [&](const VectorXd& m, double t) { return C(t) * (m(1) - m(0) * m(0)); }});
  return run_plan(ctx, fs, plan);
}

std::vector<InequalityReport> check_reverse_log_sobolev(const CheckContext& ctx,
                                                        const std::vector<TestFunction>& fs, const Point& point,
                                                        const std::vector<double>& times, const ConstantFn& C,
                                                        const FormFn& Q) {
  check_times(times);
  const MarkovKernel& k = *ctx.kernel;
  const int K = k.frame_size();
  const double h = fd_step(ctx);
  Plan plan;
  plan.point = point;
  plan.starts = stencil(k, point, h, 0.0, false);
  plan.sim_times = plan.report_times = times;
  plan.size = 2 + K;
  plan.needs_positive = true;
  const std::size_t ns = plan.starts.size();
  plan.fill = [&, ns, h](const TestFunction& f, const std::vector<Point>& ends, std::size_t r, double* out) {
    const Point* e = ends.data() + r * ns;
    const double f0 = value_at(k, f, e[0]);
    out[0] = f0;
    out[1] = f0 > 0.0 ? f0 * std::log(f0) : std::nan("");
    fill_fd_gradient(k, f, e, h, out + 2);
  };
  plan.exact = [&](const TestFunction& f, std::size_t r) -> std::optional<VectorXd> {
    const auto law = exact_law(k, times[r]);
    if (!law) return std::nullopt;
    const auto m = ridge_moments(*f.ridge, *law, point);
    if (!m.pflogf) return std::nullopt;
    VectorXd v(2 + K);
    v << m.pf, *m.pflogf, m.grad;
    return v;
  };
  plan.rows.push_back(
      {"reverse_log_sobolev",
       [&, K](const VectorXd& m, double t) { return quad(form_or_identity(Q, t, K), m.tail(K)) / m(0); },
       [&](const VectorXd& m, double t) { return C(t) * (m(1) - m(0) * std::log(m(0))); }});
  return run_plan(ctx, fs, plan);
}

std::vector<InequalityReport> check_li_yau(const CheckContext& ctx, const std::vector<TestFunction>& fs,
                                           const Point& point, const std::vector<double>& times, const ConstantFn& a,
                                           const ConstantFn& b) {
  check_times(times);
  const MarkovKernel& k = *ctx.kernel;
  if (!k.frame_generates()) {
    std::vector<InequalityReport> out;
    for (const auto& f : fs)
      for (double t : times) {
        auto r = error_report("li_yau", k.id(), f.id, point, t,
                              "generator is not a sum of squares of the frame", Status::Unsupported);
        r.job = ctx.job;
        out.push_back(r);
      }
    return out;
  }
  const int K = k.frame_size();
  const double h = fd_step(ctx), hl = ctx.laplacian_step;
  Plan plan;
  plan.point = point;
  plan.starts = stencil(k, point, h, hl, true);
  plan.sim_times = plan.report_times = times;
  plan.size = 2 + K;
  plan.needs_positive = true;
  const std::size_t ns = plan.starts.size();
  plan.fill = [&, ns, h, hl, K](const TestFunction& f, const std::vector<Point>& ends, std::size_t r, double* out) {
    const Point* e = ends.data() + r * ns;
    const double f0 = value_at(k, f, e[0]);
    out[0] = f0;
    fill_fd_gradient(k, f, e, h, out + 1);
    double lap = 0.0;
    for (int i = 0; i < K; ++i) {
      lap += value_at(k, f, e[1 + 2 * K + 2 * i]) + value_at(k, f, e[2 + 2 * K + 2 * i]) - 2.0 * f0;
    }
    out[1 + K] = lap / (hl * hl);
  };
  plan.exact = [&](const TestFunction& f, std::size_t r) -> std::optional<VectorXd> {
    const auto law = exact_law(k, times[r]);
    if (!law) return std::nullopt;
    const auto m = ridge_moments(*f.ridge, *law, point);
    VectorXd v(2 + K);
    v << m.pf, m.grad, m.laplacian;
    return v;
  };
  plan.rows.push_back({"li_yau",
                       [K](const VectorXd& m, double) { return m.segment(1, K).squaredNorm() / (m(0) * m(0)); },
                       [&, K](const VectorXd& m, double t) { return a(t) * m(1 + K) / m(0) + b(t); }});
  return run_plan(ctx, fs, plan);
}

namespace {

std::optional<double> exact_power_mean(const Ridge& r, const RidgeMoments& m, double p) {
  if (r.shape == RidgeShape::Exp && r.shift == 0.0 && r.amp > 0.0) {
    return std::pow(r.amp, p) * std::exp(p * m.mu + 0.5 * p * p * m.s * m.s);
  }
  const double v = gaussian_expectation(
      [&r, p](double u) {
        const double x = r.amp * r.phi(u) + r.shift;
        return x >= 0.0 ? std::pow(x, p) : std::nan("");
      },
      m.mu, m.s, 96);
  if (!std::isfinite(v)) return std::nullopt;
  return v;
}

}  // namespace

std::vector<InequalityReport> check_wang_harnack(const CheckContext& ctx, const std::vector<TestFunction>& fs,
                                                 const Point& x, const Point& y, const std::vector<double>& times,
                                                 double p, const ConstantFn& C, double distance) {
  require(p > 1.0, "Wang-Harnack needs p > 1");
  check_times(times);
  const MarkovKernel& k = *ctx.kernel;
  Plan plan;
  plan.point = x;
  plan.starts = {x, y};
  plan.sim_times = plan.report_times = times;
  plan.size = 2;
  plan.needs_positive = true;
  plan.fill = [&, p](const TestFunction& f, const std::vector<Point>& ends, std::size_t r, double* out) {
    out[0] = value_at(k, f, ends[r * 2]);
    out[1] = std::pow(value_at(k, f, ends[r * 2 + 1]), p);
  };
  plan.exact = [&, p](const TestFunction& f, std::size_t r) -> std::optional<VectorXd> {
    const auto law = exact_law(k, times[r]);
    if (!law) return std::nullopt;
    const auto mx = ridge_moments(*f.ridge, *law, x);
    const auto my = ridge_moments(*f.ridge, *law, y);
    const auto py = exact_power_mean(*f.ridge, my, p);
    if (!py) return std::nullopt;
    return VectorXd{{mx.pf, *py}};
  };
  plan.rows.push_back({"wang_harnack", [p](const VectorXd& m, double) { return std::pow(m(0), p); },
                       [&, p, distance](const VectorXd& m, double t) {
                         return m(1) * std::exp(p / (p - 1.0) * C(t) * distance * distance / 4.0);
                       }});
  return run_plan(ctx, fs, plan);
}

std::vector<InequalityReport> check_parabolic_harnack(const CheckContext& ctx, const std::vector<TestFunction>& fs,
                                                      const Point& x, const Point& y, double s, double t, int n,
                                                      double distance) {
  if (!(s > 0.0 && s < t)) throw InputError("parabolic Harnack needs 0 < s < t");
  require(n >= 1, "parabolic Harnack needs n >= 1");
  const MarkovKernel& k = *ctx.kernel;
  Plan plan;
  plan.point = x;
  plan.starts = {x, y};
  plan.sim_times = {s, t};
  plan.report_times = {t};
  plan.size = 3;
  // Columns: P_s f(x), P_t f(y), P_t f(x).
  plan.fill = [&](const TestFunction& f, const std::vector<Point>& ends, std::size_t, double* out) {
    out[0] = value_at(k, f, ends[0]);
    out[1] = value_at(k, f, ends[3]);
    out[2] = value_at(k, f, ends[2]);
  };
  plan.exact = [&](const TestFunction& f, std::size_t) -> std::optional<VectorXd> {
    const auto ls = exact_law(k, s), lt = exact_law(k, t);
    if (!ls || !lt) return std::nullopt;
    return VectorXd{{ridge_moments(*f.ridge, *ls, x).pf, ridge_moments(*f.ridge, *lt, y).pf,
                     ridge_moments(*f.ridge, *lt, x).pf}};
  };
  const double factor = std::pow(t / s, 8.0 * n) * std::exp(4.0 * distance * distance / (t - s));
  plan.rows.push_back({"parabolic_harnack", [](const VectorXd& m, double) { return m(0); },
                       [factor](const VectorXd& m, double) { return m(1) * factor; }});
  plan.rows.push_back({"parabolic_harnack_display", [](const VectorXd& m, double) { return m(2); },
                       [factor](const VectorXd& m, double) { return m(1) * factor; }, true});
  return run_plan(ctx, fs, plan);
}

InequalityReport check_wasserstein_contraction(const CheckContext& ctx, const Point& x, const Point& y, double t,
                                               double q, double C, const ContractionOptions& opts) {
  const MarkovKernel& k = *ctx.kernel;
  InequalityReport rep;
  rep.job = ctx.job;
  rep.inequality = "wasserstein_contraction";
  rep.kernel = k.id();
  rep.function = "-";
  rep.point = x;
  rep.t = t;
  try {
    require(q > 1.0, "Wasserstein contraction needs q > 1");
    require(opts.samples >= 2, "contraction check needs at least two samples");
    const int n = std::min(opts.samples, 512);
    std::vector<Point> cx, cy;
    for (int i = 0; i < n; ++i) {
      RandomStream rng(ctx.key, std::uint64_t(i));
      RandomStream replay = rng;
      cx.push_back(k.sample(x, t, rng));
      cy.push_back(k.sample(y, t, replay));
    }
    const auto mu = EmpiricalMeasure::uniform(k.space(), cx);
    const auto nu = EmpiricalMeasure::uniform(k.space(), cy);
    rep.lhs = wasserstein_exact(mu, nu, q).value;
    rep.rhs = C * k.space().distance(x, y);
    if (opts.bootstrap > 1) {
      RandomStream boot(ctx.key, std::uint64_t(n) + 1);
      std::vector<double> vals;
      for (int b = 0; b < opts.bootstrap; ++b) {
        std::vector<Point> bx, by;
        for (int i = 0; i < n; ++i) {
          const auto j = std::size_t(boot.uniform() * n);
          bx.push_back(cx[std::min(j, cx.size() - 1)]);
          by.push_back(cy[std::min(j, cy.size() - 1)]);
        }
        vals.push_back(wasserstein_exact(EmpiricalMeasure::uniform(k.space(), bx),
                                         EmpiricalMeasure::uniform(k.space(), by), q)
                           .value);
      }
      double mean = 0.0, var = 0.0;
      for (double v : vals) mean += v / vals.size();
      for (double v : vals) var += (v - mean) * (v - mean) / (vals.size() - 1);
      rep.se_lhs = std::sqrt(var);
    }
    rep.note = "samples=" + std::to_string(n);
    Verdict v = ctx.verdict;
    v.tolerance = std::max(v.tolerance, 1e-12);
    finalize(rep, v);
  } catch (const std::exception& e) {
    auto err = error_report(rep.inequality, rep.kernel, rep.function, x, t, e.what());
    err.job = ctx.job;
    return err;
  }
  return rep;
}

InequalityReport check_hellinger_contraction(const KolmogorovSpec& spec, const Point& x, const Point& y, double t) {
  spec.validate();
  const double sigma2 = spec.sigma.array().square().minCoeff();
  InequalityReport rep;
  rep.inequality = "hellinger_contraction";
  rep.kernel = kolmogorov_kernel(spec)->id();
  rep.function = "-";
  rep.point = x;
  rep.t = t;
  require(x.size() == 2 * spec.sigma.size() && y.size() == x.size(), "points have the wrong dimension");
  require(t > 0.0, "hellinger contraction needs t > 0");
  const auto law = kolmogorov_law(spec, t);
  const double he = hellinger_gaussian(law.M * x + law.shift, law.cov, law.M * y + law.shift, law.cov);
  const double d = kolmogorov_control_distance(t, x, y);
  rep.lhs = he * he;
  rep.rhs = 1.0 / (sigma2 * t) / 4.0 * d * d;
  rep.note = "exact";
  finalize(rep, Verdict{3.0, 1e-12 * std::max(1.0, rep.rhs)});
  return rep;
}

std::vector<InequalityReport> check_intertwining(const CheckContext& ctx, const KernelPtr& direct,
                                                 const std::vector<TestFunction>& fs, const Point& pushed_start,
                                                 const Point& direct_start, double t) {
  require(t > 0.0, "intertwining needs t > 0");
  const MarkovKernel& pushed = *ctx.kernel;
  require(pushed.observed_dimension() == direct->observed_dimension(),
          "pushed and direct kernels observe different dimensions");
  auto run = [&](const MarkovKernel& k, const Point& start, std::uint64_t key) {
    SimulationRequest req;
    req.starts = {start};
    req.times = {t};
    req.groups.assign(fs.size(), 1);
    req.paths = ctx.paths;
    req.key = key;
    return simulate(k, req, [&](const std::vector<Point>& ends, double* out) {
      const Point obs = k.observe(ends[0]);
      for (std::size_t i = 0; i < fs.size(); ++i) out[i] = fs[i](obs);
    });
  };
  std::vector<InequalityReport> out;
  try {
    const auto a = run(pushed, pushed_start, ctx.key);
    const auto b = run(*direct, direct_start, splitmix64(ctx.key ^ 0x9e3779b97f4a7c15ULL));
    for (std::size_t i = 0; i < fs.size(); ++i) {
      InequalityReport rep;
      rep.job = ctx.job;
      rep.inequality = "intertwining";
      rep.kernel = pushed.id() + "|" + direct->id();
      rep.function = fs[i].id;
      rep.point = direct_start;
      rep.t = t;
      rep.lhs = std::abs(a[i].mean(0) - b[i].mean(0));
      rep.rhs = 0.0;
      rep.se_lhs = std::hypot(a[i].stderr_at(0), b[i].stderr_at(0));
      rep.note = "mc paths=" + std::to_string(ctx.paths);
      Verdict v = ctx.verdict;
      v.allow_inconclusive = false;
      finalize(rep, v);
      out.push_back(rep);
    }
  } catch (const std::exception& e) {
    for (const auto& f : fs) {
      auto r = error_report("intertwining", pushed.id() + "|" + direct->id(), f.id, direct_start, t, e.what());
      r.job = ctx.job;
      out.push_back(r);
    }
  }
  return out;
}

CarnotConstants carnot_constants(int n, double t) {
  require(t > 0.0 && n >= 1, "carnot constants need t > 0 and n >= 1");
  return {1.0 / t, 5.0 / t, 4.0, 16.0 * n / t};
}

double kinetic_rpi_ratio(const KineticFPSpec& spec, double t) {
  require(t > 0.0, "kinetic ratio needs t > 0");
  const auto law = kinetic_linear_law(spec, t);
  const MatrixXd S = law.M.transpose() * law.cov.llt().solve(law.M);
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (S + S.transpose()), Eigen::EigenvaluesOnly);
  const double tm = std::min(t, 1.0);
  return es.eigenvalues().maxCoeff() * tm * tm * tm;
}

double fit_kinetic_constant(const KineticFPSpec& spec, const std::vector<double>& times) {
  require(!times.empty(), "fit needs at least one time");
  double c = 0.0;
  for (double t : times) c = std::max(c, kinetic_rpi_ratio(spec, t));
  return c;
}

std::vector<InequalityReport> check_kinetic_rpi(const KineticFPSpec& spec, const std::vector<TestFunction>& fs,
                                                const Point& point, const std::vector<double>& times, double c) {
  std::vector<InequalityReport> out;
  const std::string kid = kinetic_linear_kernel(spec)->id();
  for (const auto& f : fs) {
    for (double t : times) {
      if (!f.ridge) {
        out.push_back(error_report("kinetic_rpi", kid, f.id, point, t, "closed form needs a ridge function",
                                   Status::Unsupported));
        continue;
      }
      const auto m = ridge_moments(*f.ridge, kinetic_linear_law(spec, t), point);
      InequalityReport rep;
      rep.inequality = "kinetic_rpi";
      rep.kernel = kid;
      rep.function = f.id;
      rep.point = point;
      rep.t = t;
      const double tm = std::min(t, 1.0);
      rep.lhs = m.grad.squaredNorm();
      rep.rhs = c / (tm * tm * tm) * m.pf2;
      rep.note = "exact";
      finalize(rep, Verdict{3.0, 1e-12 * std::max({1.0, rep.lhs, rep.rhs})});
      out.push_back(rep);
    }
  }
  return out;
}

}  // namespace hypo
