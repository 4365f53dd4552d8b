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

#include "hypo/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

#include <Eigen/Eigenvalues>

namespace hypo {

using Eigen::MatrixXd;
using Eigen::VectorXd;

Estimate Estimate::exact_value(const VectorXd& v) {
  return {v, MatrixXd::Zero(v.size(), v.size()), 0, true};
}

double Estimate::stderr_at(int i) const {
  if (exact || n < 2) return 0.0;
  return std::sqrt(std::max(0.0, cov(i, i)) / double(n));
}

double Estimate::stderr_of(const std::function<double(const VectorXd&)>& g) const {
  if (exact || n < 2) return 0.0;
  const Eigen::Index k = mean.size();
  VectorXd grad = VectorXd::Zero(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    const double se = stderr_at(int(i));
    if (se == 0.0) continue;
    const double h = 1e-2 * se;
    VectorXd up = mean, dn = mean;
    up(i) += h;
    dn(i) -= h;
    grad(i) = (g(up) - g(dn)) / (2.0 * h);
  }
  const double var = grad.dot(cov * grad) / double(n);
  return std::sqrt(std::max(0.0, var));
}

namespace {

struct GroupAccumulator {
  int offset = 0;
  int size = 0;
  VectorXd mean;
  MatrixXd m2;
};

}  // namespace

std::vector<Estimate> simulate(const MarkovKernel& kernel, const SimulationRequest& req,
                               const Observer& observe) {
  require(req.paths >= 2, "simulation needs at least two paths");
  require(!req.starts.empty() && !req.times.empty(), "simulation needs starts and times");
  std::vector<GroupAccumulator> acc;
  int total = 0;
  for (int g : req.groups) {
    require(g > 0, "statistic groups must be nonempty");
    acc.push_back({total, g, VectorXd::Zero(g), MatrixXd::Zero(g, g)});
    total += g;
  }
  const std::size_t ns = req.starts.size(), nt = req.times.size();
  const bool translate = kernel.left_invariant();
  const Point e = translate ? kernel.identity() : Point();
  std::vector<Point> ends(ns * nt);
  std::vector<double> row(static_cast<std::size_t>(total));
  VectorXd delta;
  for (long path = 0; path < req.paths; ++path) {
    RandomStream rng(req.key, std::uint64_t(path));
    if (translate) {
      const auto inc = kernel.sample_path(e, req.times, rng);
      for (std::size_t ti = 0; ti < nt; ++ti)
        for (std::size_t si = 0; si < ns; ++si)
          ends[ti * ns + si] = kernel.multiply(req.starts[si], inc[ti]);
    } else {
      for (std::size_t si = 0; si < ns; ++si) {
        RandomStream replay = rng;
        const auto path_pts = kernel.sample_path(req.starts[si], req.times, replay);
        for (std::size_t ti = 0; ti < nt; ++ti) ends[ti * ns + si] = path_pts[ti];
      }
    }
    observe(ends, row.data());
    const double n = double(path + 1);
    for (auto& a : acc) {
      const Eigen::Map<const VectorXd> x(row.data() + a.offset, a.size);
      delta = x - a.mean;
      a.mean += delta / n;
      a.m2.noalias() += delta * (x - a.mean).transpose();
    }
  }
  std::vector<Estimate> out;
  for (auto& a : acc) {
    MatrixXd cov = a.m2 / double(req.paths - 1);
    cov = 0.5 * (cov + cov.transpose()).eval();
    out.push_back({a.mean, cov, req.paths, false});
  }
  return out;
}

std::vector<Point> sample_cloud(const MarkovKernel& kernel, const Point& start, double t, long n,
                                std::uint64_t key) {
  std::vector<Point> out;
  out.reserve(std::size_t(n));
  for (long i = 0; i < n; ++i) {
    RandomStream rng(key, std::uint64_t(i));
    out.push_back(kernel.sample_observed(start, t, rng));
  }
  return out;
}

const QuadratureRule& gauss_hermite(int n) {
  static std::mutex mu;
  static std::map<int, QuadratureRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  require(n >= 1, "quadrature needs at least one node");
  MatrixXd J = MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) J(k - 1, k) = J(k, k - 1) = std::sqrt(double(k));
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(J);
  QuadratureRule rule;
  for (int i = 0; i < n; ++i) {
    rule.nodes.push_back(es.eigenvalues()(i));
    rule.weights.push_back(es.eigenvectors()(0, i) * es.eigenvectors()(0, i));
  }
  return cache.emplace(n, std::move(rule)).first->second;
}

double gaussian_expectation(const std::function<double(double)>& g, double mean, double sd, int nodes) {
  if (sd == 0.0) return g(mean);
  const auto& rule = gauss_hermite(nodes);
  double s = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) s += rule.weights[i] * g(mean + sd * rule.nodes[i]);
  return s;
}

double sliced_wasserstein2(const std::vector<Point>& a, const std::vector<Point>& b, int directions,
                           std::uint64_t key) {
  require(!a.empty() && a.size() == b.size(), "sliced W2 needs equal nonempty clouds");
  require(directions > 0, "sliced W2 needs at least one direction");
  const Eigen::Index d = a.front().size();
  RandomStream rng(key, 0);
  std::vector<double> pa(a.size()), pb(b.size());
  double total = 0.0;
  for (int k = 0; k < directions; ++k) {
    VectorXd u(d);
    for (Eigen::Index i = 0; i < d; ++i) u(i) = rng.normal();
    u.normalize();
    for (std::size_t i = 0; i < a.size(); ++i) {
      pa[i] = u.dot(a[i]);
      pb[i] = u.dot(b[i]);
    }
    std::sort(pa.begin(), pa.end());
    std::sort(pb.begin(), pb.end());
    double s = 0.0;
    for (std::size_t i = 0; i < pa.size(); ++i) s += (pa[i] - pb[i]) * (pa[i] - pb[i]);
    total += s / double(pa.size());
  }
  return std::sqrt(total / directions);
}

}  // namespace hypo
