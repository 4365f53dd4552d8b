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
#include <vector>

#include "hypo/kernel.hpp"

namespace hypo {

/// Sample mean and per-observation covariance of a vector statistic.
struct Estimate {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
  long n = 0;
  bool exact = false;

  static Estimate exact_value(const Eigen::VectorXd& v);

  /// Standard error of g(mean) by the delta method (numerical gradient).
  double stderr_of(const std::function<double(const Eigen::VectorXd&)>& g) const;
  double stderr_at(int i) const;
};

/// Endpoints handed to an observer: ends[ti * starts + si], raw states.
using Observer = std::function<void(const std::vector<Point>& ends, double* out)>;

struct SimulationRequest {
  std::vector<Point> starts;
  std::vector<double> times;
  /// Sizes of the statistic groups written by the observer; covariance is
  /// only accumulated within a group.
  std::vector<int> groups;
  long paths = 0;
  std::uint64_t key = 0;
};

/// Runs `paths` sample paths, each observed at every time from every start
/// under common random numbers, and returns one Estimate per group.
///
/// Left-invariant kernels draw one increment path from the identity and
/// translate it to each start; other kernels replay the same stream from
/// each start.
std::vector<Estimate> simulate(const MarkovKernel& kernel, const SimulationRequest& req,
                               const Observer& observe);

/// n endpoints of P_t from start, observed coordinates.
std::vector<Point> sample_cloud(const MarkovKernel& kernel, const Point& start, double t, long n,
                                std::uint64_t key);

/// Probabilists' Gauss-Hermite rule: E g(Z) ~ sum w_i g(x_i), Z ~ N(0,1).
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
const QuadratureRule& gauss_hermite(int n = 64);
double gaussian_expectation(const std::function<double(double)>& g, double mean, double sd,
                            int nodes = 64);

/// Sliced 2-Wasserstein distance between two equal-size clouds.
double sliced_wasserstein2(const std::vector<Point>& a, const std::vector<Point>& b, int directions,
                           std::uint64_t key);

}  // namespace hypo
