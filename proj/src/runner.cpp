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

#include "hypo/runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <regex>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "hypo/estimate.hpp"
#include "hypo/lie.hpp"
#include "hypo/metric.hpp"
#include "hypo/transport.hpp"

namespace hypo {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using json = nlohmann::json;

namespace {

double parse_real(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) throw InputError("bad number '" + s + "'");
  return v;
}

double kolmogorov_sigma2(const std::string& kernel_id) {
  static const std::regex re(R"(kolmogorov:([-+0-9.eE]+(?:,[-+0-9.eE]+)*))");
  double best = std::numeric_limits<double>::infinity();
  for (std::sregex_iterator it(kernel_id.begin(), kernel_id.end(), re), end; it != end; ++it) {
    std::stringstream ss((*it)[1].str());
    std::string tok;
    while (std::getline(ss, tok, ',')) best = std::min(best, parse_real(tok) * parse_real(tok));
  }
  if (!std::isfinite(best)) throw InputError("constant 'kolmogorov' needs a Kolmogorov kernel, got " + kernel_id);
  return best;
}

}  // namespace

ConstantFn parse_constant(const std::string& expr, const std::string& kernel_id, double dt) {
  if (expr.empty()) throw InputError("check needs a constant");
  if (expr == "kolmogorov") {
    const double s2 = kolmogorov_sigma2(kernel_id);
    return [s2](double t) { return 1.0 / (s2 * t); };
  }
  if (expr == "mean-operator-norm") {
    auto k = make_kernel(kernel_id, dt);
    return [k](double t) {
      const auto law = k->gaussian_law(t);
      if (!law) throw UnsupportedError("mean-operator-norm needs a Gaussian kernel");
      Eigen::JacobiSVD<MatrixXd> svd(law->M);
      return svd.singularValues()(0);
    };
  }
  const auto colon = expr.find(':');
  if (colon != std::string::npos) {
    const std::string head = expr.substr(0, colon);
    const auto spec = make_transverse_spec(expr.substr(colon + 1));
    const auto bundle = constants(spec);
    const int n = spec.n;
    if (head == "transverse-rp") return [bundle, n](double t) { return transverse_constants(bundle, t, n).rp; };
    if (head == "transverse-rls") return [bundle, n](double t) { return transverse_constants(bundle, t, n).rls; };
    if (head == "cd-rp") return [bundle, n](double t) { return transverse_constants(bundle, t, n).cd_rp; };
    if (head == "cd-rls") return [bundle, n](double t) { return transverse_constants(bundle, t, n).cd_rls; };
    throw InputError("unknown constant '" + expr + "'");
  }
  if (expr.size() > 2 && expr.compare(expr.size() - 2, 2, "/t") == 0) {
    const double c = parse_real(expr.substr(0, expr.size() - 2));
    return [c](double t) { return c / t; };
  }
  const double c = parse_real(expr);
  return [c](double) { return c; };
}

namespace {

std::pair<ConstantFn, ConstantFn> parse_li_yau(const std::string& expr, const std::string& kernel_id) {
  if (expr.rfind("carnot:", 0) == 0) {
    const int n = int(parse_real(expr.substr(7)));
    return {[n](double t) { return carnot_constants(n, t).ly_a; },
            [n](double t) { return carnot_constants(n, t).ly_b; }};
  }
  if (expr.rfind("transverse:", 0) == 0 || expr.rfind("cd:", 0) == 0) {
    const bool cd = expr[0] == 'c';
    const auto spec = make_transverse_spec(expr.substr(expr.find(':') + 1));
    const auto bundle = constants(spec);
    const int n = spec.n;
    return {[bundle, n, cd](double t) {
              const auto c = transverse_constants(bundle, t, n);
              return cd ? c.cd_ly_a : c.ly_a;
            },
            [bundle, n, cd](double t) {
              const auto c = transverse_constants(bundle, t, n);
              return cd ? c.cd_ly_b : c.ly_b;
            }};
  }
  const auto comma = expr.find(',');
  if (comma == std::string::npos) throw InputError("li_yau needs 'carnot:n', 'transverse:<group>' or 'a,b'");
  return {parse_constant(expr.substr(0, comma), kernel_id), parse_constant(expr.substr(comma + 1), kernel_id)};
}

struct Job {
  std::string id;
  const CheckConfig* check = nullptr;
  std::optional<std::size_t> point;
  std::uint64_t key = 0;
  long paths = 0;
  double dt = 0.0;
};

bool point_based(const std::string& type) {
  return type == "gradient_bound" || type == "reverse_poincare" || type == "reverse_log_sobolev" ||
         type == "li_yau" || type == "wang_harnack" || type == "parabolic_harnack" ||
         type == "wasserstein_contraction";
}

std::vector<TestFunction> families(const std::vector<std::string>& names, int dim) {
  std::vector<TestFunction> out;
  for (const auto& n : names) {
    auto f = function_family(n, dim);
    out.insert(out.end(), f.begin(), f.end());
  }
  if (out.empty()) throw InputError("check needs at least one function family");
  return out;
}

Point default_point(const MarkovKernel& k) {
  return k.left_invariant() ? k.identity() : Point(Point::Zero(k.dimension()));
}

InequalityReport lemma_row(const std::string& inequality, const std::string& function, double lhs, double rhs,
                           double tol) {
  InequalityReport r;
  r.inequality = inequality;
  r.kernel = "-";
  r.function = function;
  r.point = Point();
  r.lhs = lhs;
  r.rhs = rhs;
  r.note = "exact";
  finalize(r, Verdict{3.0, tol});
  return r;
}

MatrixXd random_orthogonal(int n, RandomStream& rng) {
  MatrixXd g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = rng.normal();
  Eigen::HouseholderQR<MatrixXd> qr(g);
  MatrixXd q = qr.householderQ();
  for (int j = 0; j < n; ++j)
    if (qr.matrixQR()(j, j) < 0) q.col(j) *= -1.0;
  return q;
}

std::vector<InequalityReport> product_hellinger_rows(int instances, RandomStream& rng) {
  std::vector<InequalityReport> out;
  const auto space = euclidean_space(1);
  auto measure = [&](int atoms) {
    std::vector<int> lattice{0, 1, 2, 3};
    for (int i = 3; i > 0; --i) std::swap(lattice[i], lattice[std::size_t(rng.uniform() * (i + 1)) % (i + 1)]);
    EmpiricalMeasure m{space, {}, VectorXd(atoms)};
    for (int a = 0; a < atoms; ++a) {
      m.points.push_back(Point::Constant(1, lattice[a]));
      m.weights(a) = 0.05 + rng.uniform();
    }
    m.weights /= m.weights.sum();
    return m;
  };
  for (int k = 0; k < instances; ++k) {
    const int comps = 1 + int(rng.uniform() * 4) % 4;
    std::vector<EmpiricalMeasure> mu, nu;
    for (int c = 0; c < comps; ++c) {
      mu.push_back(measure(1 + int(rng.uniform() * 4) % 4));
      nu.push_back(measure(1 + int(rng.uniform() * 4) % 4));
    }
    auto r = check_product_hellinger(mu, nu);
    r.function = "instance" + std::to_string(k);
    out.push_back(r);
  }
  return out;
}

std::vector<InequalityReport> product_wasserstein_rows(int instances, RandomStream& rng) {
  std::vector<InequalityReport> out;
  const auto space = euclidean_space(2);
  auto measure = [&]() {
    const int atoms = 1 + int(rng.uniform() * 8) % 8;
    EmpiricalMeasure m{space, {}, VectorXd(atoms)};
    for (int a = 0; a < atoms; ++a) {
      m.points.push_back(Point{{rng.normal(), rng.normal()}});
      m.weights(a) = 0.05 + rng.uniform();
    }
    m.weights /= m.weights.sum();
    return m;
  };
  for (int k = 0; k < instances; ++k) {
    std::vector<EmpiricalMeasure> mu{measure(), measure()}, nu{measure(), measure()};
    auto r = check_product_wasserstein(mu, nu, 2.0);
    r.function = "instance" + std::to_string(k);
    out.push_back(r);
  }
  return out;
}

std::vector<InequalityReport> constants_rows(RandomStream& rng) {
  std::vector<InequalityReport> out;
  const double so3 = constants(so3_spec()).rho;
  const double so4 = constants(so4_spec()).rho;
  out.push_back(lemma_row("constants_calculus", "rho(so3)=1", std::abs(so3 - 1.0), 1e-10, 0.0));
  out.push_back(lemma_row("constants_calculus", "rho(so4)=sqrt2", std::abs(so4 - std::sqrt(2.0)), 1e-10, 0.0));
  const auto h = constants(heisenberg_spec(1));
  out.push_back(lemma_row("constants_calculus", "gamma(heisenberg3)=1/2", std::abs(h.gamma - 0.5), 1e-12, 0.0));
  out.push_back(lemma_row("constants_calculus", "kappa(heisenberg3)=1", std::abs(h.kappa - 1.0), 1e-12, 0.0));
  for (int n = 2; n <= 6; ++n) {
    for (int m = 1; m <= n; ++m) {
      const auto c = constants(vandermonde_family(n, m));
      const double expected = 2.0 * (std::pow(double(n), m) - 1.0) / (n * (n - 1.0));
      out.push_back(lemma_row("constants_calculus",
                              "kappa/gamma(vandermonde:" + std::to_string(n) + ":" + std::to_string(m) + ")",
                              std::abs(c.kappa / c.gamma - expected), 1e-9, 0.0));
    }
  }
  for (int k = 0; k < 200; ++k) {
    const int n = 1 + int(rng.uniform() * 5) % 5;
    MatrixXd lambda(n, n), mu = MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i)
      for (int l = 0; l < n; ++l) lambda(i, l) = rng.normal();
    if (rng.uniform() < 0.5)
      for (int i = 0; i < n; ++i)
        for (int l = 0; l < n; ++l) mu(i, l) = rng.normal();
    const auto spec = conjugate(block_family("random", lambda, mu), random_orthogonal(2 * n, rng));
    const auto c = constants(spec);
    out.push_back(lemma_row("constants_calculus", "kappa/gamma>=2(random" + std::to_string(k) + ",n=m=" +
                                std::to_string(n) + ")",
                            2.0, c.kappa / c.gamma, 1e-12));
  }
  return out;
}

double multiset_error(const MatrixXd& a, const MatrixXd& b) {
  auto rows = [](const MatrixXd& m) {
    std::vector<std::vector<double>> r(std::size_t(m.rows()));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      for (Eigen::Index j = 0; j < m.cols(); ++j) r[std::size_t(i)].push_back(m(i, j));
    std::sort(r.begin(), r.end());
    return r;
  };
  if (a.rows() != b.rows() || a.cols() != b.cols()) return std::numeric_limits<double>::infinity();
  const auto ra = rows(a), rb = rows(b);
  double err = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i)
    for (std::size_t j = 0; j < ra[i].size(); ++j) err = std::max(err, std::abs(ra[i][j] - rb[i][j]));
  return err;
}

std::vector<InequalityReport> block_diagonalization_rows(int instances, RandomStream& rng) {
  std::vector<InequalityReport> out;
  for (int k = 0; k < instances; ++k) {
    const int n = 1 + int(rng.uniform() * 8) % 8;
    const int m = 1 + int(rng.uniform() * std::min(n, 4)) % std::min(n, 4);
    const int r = int(rng.uniform() * (n + 1)) % (n + 1);
    MatrixXd lambda(n, m), mu = MatrixXd::Zero(n, m);
    for (int i = 0; i < n; ++i) {
      for (int l = 0; l < m; ++l) lambda(i, l) = rng.normal();
      lambda(i, 0) = 0.1 + std::abs(lambda(i, 0));
      if (i < r)
        for (int l = 0; l < m; ++l) mu(i, l) = rng.normal();
    }
    const auto spec = conjugate(block_family("random", lambda, mu), random_orthogonal(2 * n, rng));
    std::string name = "instance" + std::to_string(k) + "(n=" + std::to_string(n) + ",m=" + std::to_string(m) + ")";
    try {
      const auto bd = block_diagonalize(spec);
      MatrixXd want(n, 2 * m), got(n, 2 * m);
      want << lambda, mu;
      got << bd.lambda, bd.mu;
      out.push_back(lemma_row("block_diagonalization", name, std::max(bd.residual, multiset_error(want, got)), 1e-9,
                              0.0));
    } catch (const std::exception& e) {
      out.push_back(error_report("block_diagonalization", "-", name, Point(), 0.0, e.what()));
    }
  }
  return out;
}

std::vector<InequalityReport> kinetic_rows(const CheckConfig& c, RandomStream& rng) {
  require(c.times.size() == 2 && c.times[0] < c.times[1], "kinetic_rpi needs times: [t_min, t_max]");
  require(c.grid >= 2, "kinetic_rpi grid needs at least two points");
  require(!c.potentials.empty(), "kinetic_rpi needs potentials");
  std::vector<double> grid;
  const double a = std::log(c.times[0]), b = std::log(c.times[1]);
  for (int i = 0; i < c.grid; ++i) grid.push_back(std::exp(a + (b - a) * i / (c.grid - 1)));
  auto spec_for = [&](int d) {
    KineticFPSpec s;
    for (int j = 0; j < d; ++j) {
      const std::string& p = c.potentials[std::size_t(j) % c.potentials.size()];
      if (p == "zero") s.potentials.push_back(zero_potential());
      else if (p.rfind("quad", 0) == 0) s.potentials.push_back(quadratic_potential(parse_real(p.substr(4))));
      else throw InputError("kinetic_rpi needs quadratic potentials, got '" + p + "'");
    }
    return s;
  };
  const std::vector<int> dims = c.dims.empty() ? std::vector<int>{1} : c.dims;
  const double cfit = fit_kinetic_constant(spec_for(dims.front()), grid);
  std::vector<InequalityReport> out;
  std::vector<double> test_times;
  for (std::size_t i = 0; i < grid.size(); i += std::max<std::size_t>(1, grid.size() / 20)) test_times.push_back(grid[i]);
  for (int d : dims) {
    const auto spec = spec_for(d);
    std::vector<TestFunction> fs;
    for (int k = 0; k < std::max(1, c.instances); ++k) {
      Point w(2 * d);
      for (int i = 0; i < 2 * d; ++i) w(i) = 0.5 * rng.normal();
      const double off = rng.normal();
      TestFunction f = k % 3 == 0 ? exp_linear(w, off) : k % 3 == 1 ? ridge_function({RidgeShape::Linear, w, off, 1.0, 0.0}, "linear")
                                                                    : sin_ridge(w, off);
      f.id = "fresh" + std::to_string(k) + "-" + f.id;
      fs.push_back(f);
    }
    Point x(2 * d);
    for (int i = 0; i < 2 * d; ++i) x(i) = 0.3 * rng.normal();
    auto rows = check_kinetic_rpi(spec, fs, x, test_times, cfit);
    for (auto& r : rows) r.note += "; c=" + format_real(cfit);
    out.insert(out.end(), rows.begin(), rows.end());
  }
  return out;
}

std::vector<InequalityReport> execute(const Job& job) {
  const CheckConfig& c = *job.check;
  RandomStream rng(job.key, 0);
  if (c.type == "product_hellinger") return product_hellinger_rows(c.instances, rng);
  if (c.type == "product_wasserstein") return product_wasserstein_rows(c.instances, rng);
  if (c.type == "constants_calculus") return constants_rows(rng);
  if (c.type == "block_diagonalization") return block_diagonalization_rows(c.instances, rng);
  if (c.type == "kinetic_rpi") return kinetic_rows(c, rng);
  if (c.type == "hellinger_contraction") {
    std::vector<InequalityReport> out;
    for (double s : c.sigma)
      for (double t : c.times)
        for (double g : c.gaps) {
          const KolmogorovSpec spec{VectorXd::Constant(1, s)};
          out.push_back(check_hellinger_contraction(spec, Point::Zero(2), Point::Constant(2, g / std::sqrt(2.0)), t));
        }
    return out;
  }

  CheckContext ctx;
  ctx.kernel = make_kernel(c.kernel, job.dt);
  ctx.paths = job.paths;
  ctx.key = job.key;
  ctx.job = job.id;
  const MarkovKernel& k = *ctx.kernel;
  if (c.type == "intertwining") {
    const auto direct = make_kernel(c.direct_kernel, job.dt);
    const auto fs = families(c.functions, direct->observed_dimension());
    const Point pushed = c.pushed_point ? *c.pushed_point : default_point(k);
    const Point start = c.points.empty() ? default_point(*direct) : c.points.front();
    require(!c.times.empty(), "intertwining needs times");
    std::vector<InequalityReport> out;
    for (std::size_t i = 0; i < c.times.size(); ++i) {
      CheckContext ci = ctx;
      ci.key = splitmix64(job.key + i);
      auto rows = check_intertwining(ci, direct, fs, pushed, start, c.times[i]);
      out.insert(out.end(), rows.begin(), rows.end());
    }
    return out;
  }

  const Point point = c.points.empty() ? default_point(k) : c.points[*job.point];
  require(point.size() == k.dimension(), "point dimension does not match kernel " + k.id());
  const int d = k.dimension() / 2;
  FormFn lhs_map, rhs_map, Q;
  bool informational = false;
  if (c.form == "kolmogorov" || c.form == "kolmogorov-half") {
    const double factor = c.form == "kolmogorov" ? 1.0 : 0.5;
    lhs_map = [d](double) { return kolmogorov_x_map(d); };
    rhs_map = [d, factor](double t) { return kolmogorov_shear_map(d, t, factor); };
    informational = c.form == "kolmogorov-half";
  } else if (c.form == "kolmogorov-twisted") {
    Q = [d](double t) { return kolmogorov_twisted_form(d, t); };
  }
  std::vector<InequalityReport> rows;
  if (c.type == "gradient_bound") {
    const ConstantFn C = c.constant.empty() ? ConstantFn([](double) { return 1.0; })
                                            : parse_constant(c.constant, c.kernel, job.dt);
    rows = check_gradient_bound(ctx, families(c.functions, k.observed_dimension()), point, c.times, c.p, C, lhs_map,
                                rhs_map);
    if (informational) {
      for (auto& r : rows) {
        r.inequality = "gradient_bound_half_shear";
        r.informational = true;
        r.note += "; informational";
      }
    }
  } else if (c.type == "reverse_poincare") {
    rows = check_reverse_poincare(ctx, families(c.functions, k.observed_dimension()), point, c.times,
                                  parse_constant(c.constant, c.kernel, job.dt), Q);
  } else if (c.type == "reverse_log_sobolev") {
    rows = check_reverse_log_sobolev(ctx, families(c.functions, k.observed_dimension()), point, c.times,
                                     parse_constant(c.constant, c.kernel, job.dt), Q);
  } else if (c.type == "li_yau") {
    const auto [a, b] = parse_li_yau(c.li_yau, c.kernel);
    rows = check_li_yau(ctx, families(c.functions, k.observed_dimension()), point, c.times, a, b);
  } else if (c.type == "wang_harnack") {
    require(c.y.has_value(), "wang_harnack needs y");
    rows = check_wang_harnack(ctx, families(c.functions, k.observed_dimension()), point, *c.y, c.times, c.p,
                              parse_constant(c.constant, c.kernel, job.dt), k.space().distance(point, *c.y));
  } else if (c.type == "parabolic_harnack") {
    require(c.y.has_value(), "parabolic_harnack needs y");
    const double dist = k.space().distance(point, *c.y);
    for (double t : c.times) {
      auto r = check_parabolic_harnack(ctx, families(c.functions, k.observed_dimension()), point, *c.y, c.s, t, c.n,
                                       dist);
      rows.insert(rows.end(), r.begin(), r.end());
    }
  } else if (c.type == "wasserstein_contraction") {
    require(c.y.has_value(), "wasserstein_contraction needs y");
    const auto C = parse_constant(c.constant, c.kernel, job.dt);
    for (double t : c.times) {
      rows.push_back(check_wasserstein_contraction(ctx, point, *c.y, t, c.q, C(t), {c.samples, c.bootstrap}));
    }
  } else {
    throw InputError("unhandled check type " + c.type);
  }
  return rows;
}

std::string resolve_output(const ExperimentConfig& cfg, const RunOptions& opts) {
  if (opts.out) return *opts.out;
  if (!cfg.output.empty()) return cfg.output;
  if (const char* env = std::getenv("HYPOINEQ_OUT"); env && *env) return env;
  return "hypoineq-out";
}

json check_json(const CheckConfig& c) {
  json j;
  j["name"] = c.name;
  j["type"] = c.type;
  if (!c.kernel.empty()) j["kernel"] = c.kernel;
  if (!c.direct_kernel.empty()) j["direct_kernel"] = c.direct_kernel;
  if (!c.functions.empty()) j["functions"] = c.functions;
  if (!c.points.empty()) {
    json pts = json::array();
    for (const auto& p : c.points) pts.push_back(std::vector<double>(p.data(), p.data() + p.size()));
    j["points"] = pts;
  }
  if (c.y) j["y"] = std::vector<double>(c.y->data(), c.y->data() + c.y->size());
  if (!c.times.empty()) j["times"] = c.times;
  if (!c.constant.empty()) j["constant"] = c.constant;
  if (!c.li_yau.empty()) j["li_yau"] = c.li_yau;
  j["form"] = c.form;
  j["p"] = c.p;
  j["q"] = c.q;
  if (c.instances) j["instances"] = c.instances;
  if (!c.sigma.empty()) j["sigma"] = c.sigma;
  if (!c.gaps.empty()) j["gaps"] = c.gaps;
  if (!c.potentials.empty()) j["potentials"] = c.potentials;
  if (c.paths) j["paths"] = *c.paths;
  if (c.dt) j["dt"] = *c.dt;
  return j;
}

}  // namespace

std::string summary_json(const std::vector<InequalityReport>& reports, const ExperimentConfig& cfg) {
  json s;
  s["seed"] = cfg.seed;
  s["rows"] = reports.size();
  json by = json::object();
  int violations = 0;
  for (const auto& r : reports) {
    auto& e = by[r.inequality];
    if (e.is_null()) {
      e = {{"pass", 0}, {"fail", 0}, {"inconclusive", 0}, {"error", 0}, {"unsupported", 0}, {"informational", r.informational}};
    }
    e[to_string(r.status)] = e[to_string(r.status)].get<int>() + 1;
    if (std::isfinite(r.margin) && (!e.contains("worst_margin") || r.margin < e["worst_margin"].get<double>())) {
      e["worst_margin"] = r.margin;
      e["worst_job"] = r.job;
      e["worst_function"] = r.function;
    }
    if (r.status == Status::Fail && !r.informational) ++violations;
  }
  s["by_inequality"] = by;
  s["violations"] = violations;
  return s.dump(2) + "\n";
}

RunResult run_experiment(const ExperimentConfig& cfg, const RunOptions& opts) {
  ExperimentConfig eff = cfg;
  if (opts.seed) eff.seed = *opts.seed;
  if (opts.paths) eff.paths = *opts.paths;
  if (opts.dt) eff.dt = *opts.dt;
  if (opts.workers) eff.workers = *opts.workers;

  std::vector<Job> jobs;
  for (const auto& c : eff.checks) {
    const long paths = opts.paths ? *opts.paths : c.paths.value_or(eff.paths);
    const double dt = opts.dt ? *opts.dt : c.dt.value_or(eff.dt);
    const std::size_t npts = point_based(c.type) ? std::max<std::size_t>(1, c.points.size()) : 1;
    for (std::size_t i = 0; i < npts; ++i) {
      Job j;
      j.check = &c;
      j.id = c.name + "#" + std::to_string(i);
      if (point_based(c.type)) j.point = i;
      j.key = RandomStream::derive_key(eff.seed, j.id);
      j.paths = paths;
      j.dt = dt;
      jobs.push_back(j);
    }
  }

  std::vector<std::vector<InequalityReport>> results(jobs.size());
  std::atomic<std::size_t> next{0};
  std::mutex log_mu;
  auto worker = [&]() {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      const auto t0 = std::chrono::steady_clock::now();
      try {
        results[i] = execute(jobs[i]);
      } catch (const std::exception& e) {
        const auto& c = *jobs[i].check;
        results[i] = {error_report(c.type, c.kernel.empty() ? "-" : c.kernel, "-", Point(), 0.0, e.what())};
      }
      for (auto& r : results[i]) r.job = jobs[i].id;
      if (opts.log) {
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::lock_guard<std::mutex> lock(log_mu);
        *opts.log << "[" << (i + 1) << "/" << jobs.size() << "] " << jobs[i].id << ": " << results[i].size()
                  << " rows, " << secs << " s\n";
      }
    }
  };
  int workers = eff.workers > 0 ? eff.workers : int(std::max(1u, std::thread::hardware_concurrency()));
  workers = std::min<int>(workers, int(std::max<std::size_t>(1, jobs.size())));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  RunResult res;
  for (auto& r : results) res.reports.insert(res.reports.end(), r.begin(), r.end());
  for (const auto& r : res.reports) {
    if (r.status == Status::Fail && !r.informational) ++res.violations;
    if (r.status == Status::Error) ++res.errors;
  }
  res.exit_code = res.violations > 0 ? kExitViolation : kExitOk;
  res.output_dir = resolve_output(eff, opts);
  if (opts.write_files) {
    namespace fs = std::filesystem;
    fs::create_directories(res.output_dir);
    std::ofstream csv(fs::path(res.output_dir) / "reports.csv");
    write_csv_header(csv);
    for (const auto& r : res.reports) write_csv_row(csv, r);
    std::ofstream(fs::path(res.output_dir) / "summary.json") << summary_json(res.reports, eff);
    json m;
    m["seed"] = eff.seed;
    m["paths"] = eff.paths;
    m["dt"] = eff.dt;
    m["workers"] = workers;
    m["output"] = res.output_dir;
    if (!eff.preset.empty()) m["preset"] = eff.preset;
    m["report_columns"] = report_columns();
    json checks = json::array();
    for (const auto& c : eff.checks) checks.push_back(check_json(c));
    m["checks"] = checks;
    json js = json::array();
    for (const auto& j : jobs) js.push_back({{"id", j.id}, {"paths", j.paths}, {"dt", j.dt}, {"key", j.key}});
    m["jobs"] = js;
    std::ofstream(fs::path(res.output_dir) / "manifest.json") << m.dump(2) << "\n";
  }
  return res;
}

std::string list_presets() {
  std::ostringstream os;
  os << "spaces:\n"
     << "  euclidean:d                 R^d with the Euclidean distance\n"
     << "  heisenberg3                 Heisenberg group, Carnot-Caratheodory distance\n"
     << "  kolmogorov-control:d:t      R^d x R^d with the Kolmogorov control distance at time t\n"
     << "  product:[a,b,...]           l2 product of spaces\n"
     << "kernels:\n"
     << "  kolmogorov:s1,...,sd        exact Gaussian Kolmogorov diffusion, sigma_j > 0\n"
     << "  euclidean:d                 heat kernel of the Laplacian on R^d\n"
     << "  heisenberg3                 horizontal Brownian motion on H^3 (Euler, dt)\n"
     << "  carnot:<group>              step-2 group from a transverse preset with R = 0\n"
     << "  carnot-from-heisenberg:<group>  pushforward of H^3 x ... x H^3\n"
     << "  so3 | so4 | su2-full        geodesic random walks on matrix groups\n"
     << "  model:rho                   model space M(rho), rho >= 0\n"
     << "  so4-from-model              M(sqrt 2) x M(sqrt 2) pushed to SO(4)\n"
     << "  kinetic:V1,...,Vd           kinetic Fokker-Planck (Euler), V in zero|quartic|quad<k>\n"
     << "  kinetic-linear:V1,...,Vd    exact law for quadratic potentials\n"
     << "  product:[k1,k2,...]         tensor product kernel\n"
     << "groups:\n"
     << "  heisenberg:n                H^(2n+1), A = J blocks, R = 0\n"
     << "  so3 | su2 | so4             brackets of the matrix algebras\n"
     << "  vandermonde:n:m             lambda_il = i^((l-1)/2), R = 0, 1 <= m <= n\n"
     << "function families:\n";
  for (const auto& f : function_family_names()) os << "  " << f << "\n";
  os << "check types:\n";
  for (const auto& t : check_types()) os << "  " << t << "\n";
  os << "constants:\n"
     << "  <c> | <c>/t | kolmogorov | mean-operator-norm\n"
     << "  transverse-rp:<group> | transverse-rls:<group> | cd-rp:<group> | cd-rls:<group>\n"
     << "  li_yau: carnot:n | transverse:<group> | cd:<group> | <a>,<b>\n"
     << "presets:\n";
  for (const auto& p : preset_names()) os << "  " << p << "\n";
  return os.str();
}

}  // namespace hypo
