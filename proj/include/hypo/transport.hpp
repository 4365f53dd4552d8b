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

#include <iosfwd>
#include <vector>

#include "hypo/metric.hpp"
#include "hypo/report.hpp"

namespace hypo {

/// Weighted point cloud on a metric space.
struct EmpiricalMeasure {
  MetricSpace space;
  std::vector<Point> points;
  Eigen::VectorXd weights;

  std::size_t size() const { return points.size(); }
  /// Throws InputError on bad weights, NaN coordinates or wrong dimension.
  void validate(double tol = 1e-12) const;

  static EmpiricalMeasure uniform(MetricSpace space, std::vector<Point> points);
  static EmpiricalMeasure dirac(MetricSpace space, const Point& x);
};

struct CouplingPlan {
  Eigen::VectorXd row_weights;
  Eigen::VectorXd col_weights;
  Eigen::MatrixXd plan;

  double marginal_violation() const;
};

struct TransportResult {
  double value = 0.0;  // (optimal cost)^(1/p)
  double cost = 0.0;   // optimal cost, sum P_ij d_ij^p
  CouplingPlan coupling;
  int iterations = 0;
};

struct TransportOptions {
  std::size_t max_support = 512;
  int max_iterations = 0;  // 0: automatic, proportional to (m+n)^2
};

/// Exact discrete optimal transport (transportation simplex).
TransportResult solve_transport(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                                const Eigen::MatrixXd& cost,
                                const TransportOptions& opts = {});

Eigen::MatrixXd cost_matrix(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu,
                            double p);

TransportResult wasserstein_exact(const EmpiricalMeasure& mu,
                                  const EmpiricalMeasure& nu, double p,
                                  const TransportOptions& opts = {});

struct EntropicOptions {
  double tolerance = 1e-9;
  int max_iterations = 10000;
};

struct EntropicResult {
  double value = 0.0;
  double cost = 0.0;
  double marginal_violation = 0.0;
  int iterations = 0;
};

/// Log-domain Sinkhorn with epsilon scaling; value is <P_eps, C>^(1/p).
EntropicResult wasserstein_entropic(const EmpiricalMeasure& mu,
                                    const EmpiricalMeasure& nu, double p,
                                    double epsilon, const EntropicOptions& opts = {});

/// Median of the cost matrix d^p, the usual scale for epsilon.
double median_cost(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, double p);

/// Atoms are matched by exact coordinate equality; unmatched atoms weigh 0.
double hellinger_discrete(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu);

double hellinger_gaussian(const Point& mean1, const Eigen::MatrixXd& cov1,
                          const Point& mean2, const Eigen::MatrixXd& cov2);

/// Product of measures on the l2-product of their spaces.
EmpiricalMeasure product_measure(const std::vector<EmpiricalMeasure>& factors);

/// W_p(prod mu_i, prod nu_i)^2 <= sum W_p(mu_i, nu_i)^2, exact on both sides.
InequalityReport check_product_wasserstein(const std::vector<EmpiricalMeasure>& mu,
                                           const std::vector<EmpiricalMeasure>& nu,
                                           double p, double tolerance = 1e-9);

/// He(prod mu_i, prod nu_i)^2 <= sum He(mu_i, nu_i)^2 via the product rule.
InequalityReport check_product_hellinger(const std::vector<EmpiricalMeasure>& mu,
                                         const std::vector<EmpiricalMeasure>& nu,
                                         double tolerance = 1e-12);

void write_coupling_csv(std::ostream& os, const CouplingPlan& plan,
                        double threshold = 0.0);
/// Rows "w,x1,...,xd" or "x1,...,xd" (uniform weights).
EmpiricalMeasure read_measure_csv(std::istream& is, MetricSpace space,
                                  bool weighted);

}  // namespace hypo
