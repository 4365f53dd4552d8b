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

#include "hypo/transport.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace hypo {

void EmpiricalMeasure::validate(double tol) const {
  require(points.size() == static_cast<std::size_t>(weights.size()),
          "measure has mismatched point and weight counts");
  require(!points.empty(), "measure has no atoms");
  for (const auto& p : points) {
    require(p.size() == space.dimension, "measure atom has wrong dimension");
    require(p.allFinite(), "measure atom has non-finite coordinates");
  }
  require((weights.array() >= 0.0).all(), "measure has negative weights");
  require(std::abs(weights.sum() - 1.0) <= tol, "measure weights do not sum to 1");
}

EmpiricalMeasure EmpiricalMeasure::uniform(MetricSpace space, std::vector<Point> points) {
  const auto n = static_cast<Eigen::Index>(points.size());
  require(n > 0, "measure has no atoms");
  return {std::move(space), std::move(points),
          Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n))};
}

EmpiricalMeasure EmpiricalMeasure::dirac(MetricSpace space, const Point& x) {
  return {std::move(space), {x}, Eigen::VectorXd::Ones(1)};
}

double CouplingPlan::marginal_violation() const {
  return std::max((plan.rowwise().sum() - row_weights).cwiseAbs().maxCoeff(),
                  (plan.colwise().sum().transpose() - col_weights).cwiseAbs().maxCoeff());
}

namespace {

struct BasisCell {
  int i;
  int j;
  double flow;
};

// Spanning-tree bookkeeping for the current basis. Nodes 0..m-1 are rows,
// m..m+n-1 are columns.
struct BasisTree {
  std::vector<double> potential;
  std::vector<int> parent_edge;
  std::vector<int> parent_node;
  std::vector<int> depth;
};

void build_tree(const std::vector<BasisCell>& basis, const Eigen::MatrixXd& cost,
                int m, int n, BasisTree& tree, std::vector<std::vector<int>>& adj) {
  const int nodes = m + n;
  for (auto& a : adj) a.clear();
  for (int e = 0; e < static_cast<int>(basis.size()); ++e) {
    adj[basis[e].i].push_back(e);
    adj[m + basis[e].j].push_back(e);
  }
  tree.potential.assign(nodes, 0.0);
  tree.parent_edge.assign(nodes, -1);
  tree.parent_node.assign(nodes, -1);
  tree.depth.assign(nodes, -1);
  std::vector<int> queue{0};
  tree.depth[0] = 0;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const int u = queue[head];
    for (int e : adj[u]) {
      const int other = u < m ? m + basis[e].j : basis[e].i;
      if (tree.depth[other] >= 0) continue;
      const double c = cost(basis[e].i, basis[e].j);
      tree.potential[other] = c - tree.potential[u];
      tree.parent_edge[other] = e;
      tree.parent_node[other] = u;
      tree.depth[other] = tree.depth[u] + 1;
      queue.push_back(other);
    }
  }
  if (static_cast<int>(queue.size()) != nodes) {
    throw NumericError("transport basis is not a spanning tree",
                       static_cast<double>(nodes - static_cast<int>(queue.size())));
  }
}

}  // namespace

TransportResult solve_transport(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                                const Eigen::MatrixXd& cost,
                                const TransportOptions& opts) {
  const int m = static_cast<int>(a.size());
  const int n = static_cast<int>(b.size());
  require(m > 0 && n > 0, "transport problem needs nonempty marginals");
  require(cost.rows() == m && cost.cols() == n, "cost matrix shape mismatch");
  if (static_cast<std::size_t>(m) > opts.max_support ||
      static_cast<std::size_t>(n) > opts.max_support) {
    throw ResourceError("support size " + std::to_string(std::max(m, n)) +
                        " exceeds exact transport cap " +
                        std::to_string(opts.max_support) +
                        "; subsample or use the entropic solver");
  }
  require((a.array() >= 0).all() && (b.array() >= 0).all(),
          "transport marginals must be nonnegative");
  require(std::abs(a.sum() - b.sum()) <= 1e-9, "transport marginals are not balanced");
  require(cost.allFinite(), "transport cost has non-finite entries");

  // North-west corner start: exactly m+n-1 cells, zero flows allowed.
  std::vector<BasisCell> basis;
  basis.reserve(m + n - 1);
  {
    Eigen::VectorXd ra = a, rb = b;
    int i = 0, j = 0;
    while (true) {
      const double x = std::min(ra(i), rb(j));
      basis.push_back({i, j, x});
      ra(i) -= x;
      rb(j) -= x;
      if (i == m - 1 && j == n - 1) break;
      if (j == n - 1 || (i < m - 1 && ra(i) <= rb(j))) ++i; else ++j;
    }
  }

  const double scale = 1.0 + cost.cwiseAbs().maxCoeff();
  const double eps = 1e-12 * scale;
  const long long cells = static_cast<long long>(m) * n;
  const long long block = std::max<long long>(64, static_cast<long long>(std::sqrt(double(cells))));
  const int max_iter = opts.max_iterations > 0 ? opts.max_iterations
                                               : 20 * (m + n) * (m + n) + 1000;

  BasisTree tree;
  std::vector<std::vector<int>> adj(m + n);
  long long cursor = 0;
  int iter = 0;
  std::vector<int> path_i, path_j;
  for (;; ++iter) {
    build_tree(basis, cost, m, n, tree, adj);
    const auto& pot = tree.potential;
    // Block pricing: first block containing a negative reduced cost wins.
    int enter_i = -1, enter_j = -1;
    double best = -eps;
    long long scanned = 0;
    while (scanned < cells) {
      const long long stop = std::min(cells, scanned + block);
      for (; scanned < stop; ++scanned) {
        const long long k = (cursor + scanned) % cells;
        const int i = static_cast<int>(k / n);
        const int j = static_cast<int>(k % n);
        const double rc = cost(i, j) - pot[i] - pot[m + j];
        if (rc < best) {
          best = rc;
          enter_i = i;
          enter_j = j;
        }
      }
      if (enter_i >= 0) break;
    }
    if (enter_i < 0) break;
    cursor = (cursor + scanned) % cells;
    if (iter >= max_iter) {
      throw NumericError("transport simplex hit iteration cap", -best);
    }

    // Tree path between row enter_i and column enter_j.
    path_i.clear();
    path_j.clear();
    int u = enter_i, v = m + enter_j;
    while (tree.depth[u] > tree.depth[v]) { path_i.push_back(tree.parent_edge[u]); u = tree.parent_node[u]; }
    while (tree.depth[v] > tree.depth[u]) { path_j.push_back(tree.parent_edge[v]); v = tree.parent_node[v]; }
    while (u != v) {
      path_i.push_back(tree.parent_edge[u]); u = tree.parent_node[u];
      path_j.push_back(tree.parent_edge[v]); v = tree.parent_node[v];
    }
    // Walking from the column back to the row, edges alternate -, +, -, ...
    std::vector<int> cycle(path_j.begin(), path_j.end());
    cycle.insert(cycle.end(), path_i.rbegin(), path_i.rend());
    double theta = std::numeric_limits<double>::infinity();
    int leave = -1;
    for (std::size_t k = 0; k < cycle.size(); k += 2) {
      if (basis[cycle[k]].flow < theta) {
        theta = basis[cycle[k]].flow;
        leave = cycle[k];
      }
    }
    for (std::size_t k = 0; k < cycle.size(); ++k) {
      basis[cycle[k]].flow += (k % 2 == 0) ? -theta : theta;
    }
    basis[leave] = {enter_i, enter_j, theta};
  }

  // Optimality certificate: dual feasibility of the final potentials.
  {
    const auto& pot = tree.potential;
    double worst = 0.0;
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j)
        worst = std::min(worst, cost(i, j) - pot[i] - pot[m + j]);
    if (worst < -1e-9 * scale) {
      throw NumericError("transport certificate failed", -worst);
    }
  }

  TransportResult res;
  res.coupling.row_weights = a;
  res.coupling.col_weights = b;
  res.coupling.plan = Eigen::MatrixXd::Zero(m, n);
  for (const auto& c : basis) {
    const double f = std::max(0.0, c.flow);
    res.coupling.plan(c.i, c.j) += f;
    res.cost += f * cost(c.i, c.j);
  }
  res.cost = std::max(0.0, res.cost);
  res.value = res.cost;
  res.iterations = iter;
  return res;
}

Eigen::MatrixXd cost_matrix(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu,
                            double p) {
  require(mu.space.dimension == nu.space.dimension,
          "measures live on different spaces");
  Eigen::MatrixXd c(mu.size(), nu.size());
  for (std::size_t i = 0; i < mu.size(); ++i)
    for (std::size_t j = 0; j < nu.size(); ++j)
      c(i, j) = std::pow(mu.space.distance(mu.points[i], nu.points[j]), p);
  return c;
}

TransportResult wasserstein_exact(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu,
                                  double p, const TransportOptions& opts) {
  require(p >= 1.0, "Wasserstein order must be >= 1");
  mu.validate();
  nu.validate();
  if (mu.size() > opts.max_support || nu.size() > opts.max_support) {
    throw ResourceError("support size exceeds exact transport cap " +
                        std::to_string(opts.max_support) +
                        "; subsample or use the entropic solver");
  }
  auto res = solve_transport(mu.weights, nu.weights, cost_matrix(mu, nu, p), opts);
  res.value = std::pow(res.cost, 1.0 / p);
  return res;
}

double median_cost(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, double p) {
  const Eigen::MatrixXd c = cost_matrix(mu, nu, p);
  std::vector<double> v(c.data(), c.data() + c.size());
  auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  return *mid;
}

namespace {

double log_sum_exp(const Eigen::Ref<const Eigen::VectorXd>& v) {
  const double mx = v.maxCoeff();
  if (!std::isfinite(mx)) return mx;
  return mx + std::log((v.array() - mx).exp().sum());
}

}  // namespace

EntropicResult wasserstein_entropic(const EmpiricalMeasure& mu,
                                    const EmpiricalMeasure& nu, double p,
                                    double epsilon, const EntropicOptions& opts) {
  require(epsilon > 0.0, "entropic regularization must be positive");
  require(p >= 1.0, "Wasserstein order must be >= 1");
  mu.validate();
  nu.validate();
  // Zero-weight atoms carry no mass; drop them.
  std::vector<int> rows, cols;
  for (Eigen::Index i = 0; i < mu.weights.size(); ++i) if (mu.weights(i) > 0) rows.push_back(int(i));
  for (Eigen::Index j = 0; j < nu.weights.size(); ++j) if (nu.weights(j) > 0) cols.push_back(int(j));
  const int m = int(rows.size()), n = int(cols.size());
  Eigen::MatrixXd c(m, n);
  Eigen::VectorXd loga(m), logb(n);
  for (int i = 0; i < m; ++i) loga(i) = std::log(mu.weights(rows[i]));
  for (int j = 0; j < n; ++j) logb(j) = std::log(nu.weights(cols[j]));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j)
      c(i, j) = std::pow(mu.space.distance(mu.points[rows[i]], nu.points[cols[j]]), p);

  EntropicResult res;
  if (m == 1 || n == 1) {
    // Only one coupling exists.
    const Eigen::VectorXd w = (m == 1) ? Eigen::VectorXd(logb.array().exp())
                                       : Eigen::VectorXd(loga.array().exp());
    res.cost = (m == 1) ? c.row(0).dot(w) : c.col(0).dot(w);
    res.value = std::pow(res.cost, 1.0 / p);
    return res;
  }

  Eigen::VectorXd f = Eigen::VectorXd::Zero(m), g = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd tmp_n(n), tmp_m(m);
  const double cmax = std::max(c.maxCoeff(), epsilon);
  double eps = cmax;
  auto sweep = [&](double e) {
    for (int i = 0; i < m; ++i) {
      tmp_n = logb + (g - c.row(i).transpose()) / e;
      f(i) = -e * log_sum_exp(tmp_n);
    }
    for (int j = 0; j < n; ++j) {
      tmp_m = loga + (f - c.col(j)) / e;
      g(j) = -e * log_sum_exp(tmp_m);
    }
  };
  auto violation = [&](double e) {
    double v = 0.0;
    for (int i = 0; i < m; ++i) {
      tmp_n = loga(i) + logb.array() + (f(i) + g.array() - c.row(i).transpose().array()) / e;
      v += std::abs(tmp_n.array().exp().sum() - std::exp(loga(i)));
    }
    return v;
  };
  // Warm start through a geometric epsilon schedule.
  while (eps > epsilon) {
    for (int k = 0; k < 50; ++k) sweep(eps);
    eps = std::max(epsilon, 0.5 * eps);
  }
  double viol = std::numeric_limits<double>::infinity();
  int it = 0;
  for (; it < opts.max_iterations; ++it) {
    sweep(epsilon);
    if (it % 5 == 4 || it == 0) {
      viol = violation(epsilon);
      if (viol < opts.tolerance) break;
    }
  }
  if (!(viol < opts.tolerance)) {
    throw NumericError("Sinkhorn did not converge", viol);
  }
  double cost = 0.0;
  for (int i = 0; i < m; ++i) {
    tmp_n = loga(i) + logb.array() + (f(i) + g.array() - c.row(i).transpose().array()) / epsilon;
    cost += (tmp_n.array().exp() * c.row(i).transpose().array()).sum();
  }
  res.cost = cost;
  res.value = std::pow(std::max(0.0, cost), 1.0 / p);
  res.marginal_violation = viol;
  res.iterations = it + 1;
  return res;
}

double hellinger_discrete(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu) {
  // Pairs matched atoms by coordinates; sum over the union support.
  std::vector<bool> used(nu.size(), false);
  double sum = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    double matched = 0.0;
    for (std::size_t j = 0; j < nu.size(); ++j) {
      if (!used[j] && nu.points[j].size() == mu.points[i].size() &&
          nu.points[j] == mu.points[i]) {
        used[j] = true;
        matched = nu.weights(j);
        break;
      }
    }
    const double d = std::sqrt(mu.weights(i)) - std::sqrt(matched);
    sum += d * d;
  }
  for (std::size_t j = 0; j < nu.size(); ++j)
    if (!used[j]) sum += nu.weights(j);
  return std::sqrt(std::clamp(sum, 0.0, 2.0));
}

double hellinger_gaussian(const Point& mean1, const Eigen::MatrixXd& cov1,
                          const Point& mean2, const Eigen::MatrixXd& cov2) {
  const auto d = mean1.size();
  require(mean2.size() == d && cov1.rows() == d && cov1.cols() == d &&
              cov2.rows() == d && cov2.cols() == d,
          "gaussian dimension mismatch");
  auto logdet = [](const Eigen::MatrixXd& s, const char* what) {
    require((s - s.transpose()).cwiseAbs().maxCoeff() <= 1e-10 * (1.0 + s.cwiseAbs().maxCoeff()),
            std::string(what) + " is not symmetric");
    Eigen::LLT<Eigen::MatrixXd> llt(s);
    require(llt.info() == Eigen::Success, std::string(what) + " is not positive definite");
    return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
  };
  const Eigen::MatrixXd avg = 0.5 * (cov1 + cov2);
  const double ld1 = logdet(cov1, "covariance 1");
  const double ld2 = logdet(cov2, "covariance 2");
  const double lda = logdet(avg, "average covariance");
  const Point dm = mean1 - mean2;
  const double q = dm.dot(avg.llt().solve(dm));
  const double log_bc = 0.25 * ld1 + 0.25 * ld2 - 0.5 * lda - 0.125 * q;
  return std::sqrt(std::max(0.0, -2.0 * std::expm1(log_bc)));
}

EmpiricalMeasure product_measure(const std::vector<EmpiricalMeasure>& factors) {
  require(!factors.empty(), "product of zero measures");
  std::vector<MetricSpace> spaces;
  for (const auto& f : factors) spaces.push_back(f.space);
  EmpiricalMeasure out{ProductMetricSpace(spaces).as_space(), {}, {}};
  std::vector<Point> pts{Point(0)};
  std::vector<double> w{1.0};
  for (const auto& f : factors) {
    std::vector<Point> np;
    std::vector<double> nw;
    for (std::size_t a = 0; a < pts.size(); ++a) {
      for (std::size_t b = 0; b < f.size(); ++b) {
        Point x(pts[a].size() + f.points[b].size());
        x << pts[a], f.points[b];
        np.push_back(std::move(x));
        nw.push_back(w[a] * f.weights(b));
      }
    }
    pts = std::move(np);
    w = std::move(nw);
  }
  out.points = std::move(pts);
  out.weights = Eigen::Map<Eigen::VectorXd>(w.data(), Eigen::Index(w.size()));
  return out;
}

InequalityReport check_product_wasserstein(const std::vector<EmpiricalMeasure>& mu,
                                           const std::vector<EmpiricalMeasure>& nu,
                                           double p, double tolerance) {
  require(p >= 2.0, "product Wasserstein bound is stated for p >= 2");
  require(mu.size() == nu.size() && !mu.empty(), "component lists differ in length");
  InequalityReport r;
  r.inequality = "product_wasserstein";
  r.kernel = "-";
  r.function = "p=" + format_real(p);
  double rhs = 0.0;
  std::size_t joint_m = 1, joint_n = 1;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    require(mu[i].space.dimension == nu[i].space.dimension,
            "component measures are on different spaces");
    const double w = wasserstein_exact(mu[i], nu[i], p).value;
    rhs += w * w;
    joint_m *= mu[i].size();
    joint_n *= nu[i].size();
  }
  const TransportOptions opts;
  if (joint_m > opts.max_support || joint_n > opts.max_support) {
    throw ResourceError("product support exceeds exact transport cap; subsample components");
  }
  const double w = wasserstein_exact(product_measure(mu), product_measure(nu), p).value;
  r.lhs = w * w;
  r.rhs = rhs;
  finalize(r, {3.0, tolerance, 0.1});
  return r;
}

InequalityReport check_product_hellinger(const std::vector<EmpiricalMeasure>& mu,
                                         const std::vector<EmpiricalMeasure>& nu,
                                         double tolerance) {
  require(mu.size() == nu.size() && !mu.empty(), "component lists differ in length");
  InequalityReport r;
  r.inequality = "product_hellinger";
  r.kernel = "-";
  r.function = "-";
  double rhs = 0.0, prod = 1.0;
  std::size_t joint_m = 1, joint_n = 1;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const double h = hellinger_discrete(mu[i], nu[i]);
    rhs += h * h;
    prod *= 1.0 - 0.5 * h * h;
    joint_m *= mu[i].size();
    joint_n *= nu[i].size();
  }
  if (joint_m <= TransportOptions{}.max_support && joint_n <= TransportOptions{}.max_support) {
    const double h = hellinger_discrete(product_measure(mu), product_measure(nu));
    r.lhs = h * h;
    r.note = "product support";
  } else {
    r.lhs = 2.0 - 2.0 * prod;
    r.note = "product rule";
  }
  r.rhs = rhs;
  finalize(r, {3.0, tolerance, 0.1});
  return r;
}

void write_coupling_csv(std::ostream& os, const CouplingPlan& plan, double threshold) {
  os << "row,col,weight\n";
  for (Eigen::Index i = 0; i < plan.plan.rows(); ++i)
    for (Eigen::Index j = 0; j < plan.plan.cols(); ++j)
      if (plan.plan(i, j) > threshold)
        os << i << ',' << j << ',' << format_real(plan.plan(i, j)) << '\n';
}

EmpiricalMeasure read_measure_csv(std::istream& is, MetricSpace space, bool weighted) {
  std::vector<Point> pts;
  std::vector<double> w;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> vals;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        vals.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw InputError("line " + std::to_string(lineno) + ": bad number '" + cell + "'");
      }
    }
    const std::size_t need = std::size_t(space.dimension) + (weighted ? 1 : 0);
    if (vals.size() != need) {
      throw InputError("line " + std::to_string(lineno) + ": expected " +
                       std::to_string(need) + " columns");
    }
    w.push_back(weighted ? vals[0] : 1.0);
    pts.push_back(Eigen::Map<Point>(vals.data() + (weighted ? 1 : 0), space.dimension));
  }
  require(!pts.empty(), "measure file has no atoms");
  Eigen::VectorXd wv = Eigen::Map<Eigen::VectorXd>(w.data(), Eigen::Index(w.size()));
  if (!weighted) wv /= wv.sum();
  EmpiricalMeasure mu{std::move(space), std::move(pts), wv};
  mu.validate(1e-9);
  return mu;
}

}  // namespace hypo
