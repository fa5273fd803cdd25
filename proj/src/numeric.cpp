/*
 * Copyright 2026 The GPDR Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "gpdr/numeric.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "gpdr/errors.hpp"

namespace gpdr::numeric {

double trapezoid_uniform(const Eigen::VectorXd& values, double a, double b) {
  const Eigen::Index n = values.size();
  if (n < 2) throw config_error("trapezoid rule needs at least 2 nodes");
  const double h = (b - a) / static_cast<double>(n - 1);
  double acc = 0.5 * (values(0) + values(n - 1));
  for (Eigen::Index i = 1; i + 1 < n; ++i) acc += values(i);
  return acc * h;
}

double simpson(const std::function<double(double)>& f, double a, double b,
               int n_points) {
  if (n_points < 3 || n_points % 2 == 0)
    throw config_error("simpson rule needs an odd node count >= 3");
  const double h = (b - a) / static_cast<double>(n_points - 1);
  double acc = f(a) + f(b);
  for (int i = 1; i < n_points - 1; ++i) {
    const double x = a + h * static_cast<double>(i);
    acc += f(x) * (i % 2 == 1 ? 4.0 : 2.0);
  }
  return acc * h / 3.0;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> gauss_hermite(int n_nodes) {
  if (n_nodes < 1) throw config_error("gauss_hermite needs n_nodes >= 1");
  // Golub-Welsch on the Hermite Jacobi matrix: zero diagonal, off-diagonal
  // sqrt(i/2). Nodes are the eigenvalues, weights sqrt(pi) * v0^2.
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n_nodes, n_nodes);
  for (int i = 1; i < n_nodes; ++i) {
    const double off = std::sqrt(static_cast<double>(i) / 2.0);
    jacobi(i, i - 1) = off;
    jacobi(i - 1, i) = off;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
  const double sqrt_pi = std::sqrt(3.14159265358979323846);
  Eigen::VectorXd nodes = solver.eigenvalues();
  Eigen::VectorXd weights(n_nodes);
  for (int i = 0; i < n_nodes; ++i) {
    const double v0 = solver.eigenvectors()(0, i);
    weights(i) = sqrt_pi * v0 * v0;
  }
  return {std::move(nodes), std::move(weights)};
}

double quantile(std::vector<double> values, double p) {
  if (values.empty()) throw config_error("quantile of empty sample");
  std::sort(values.begin(), values.end());
  const double pos = p * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = static_cast<std::size_t>(std::ceil(pos));
  const double frac = pos - std::floor(pos);
  return values[lo] + frac * (values[hi] - values[lo]);
}

double mean(const Eigen::VectorXd& v) {
  return v.size() == 0 ? 0.0 : v.mean();
}

double sample_variance(const Eigen::VectorXd& v) {
  const Eigen::Index n = v.size();
  if (n < 2) return 0.0;
  const double m = v.mean();
  return (v.array() - m).square().sum() / static_cast<double>(n - 1);
}

Eigen::VectorXd linspace(double a, double b, int n) {
  if (n < 1) throw config_error("linspace needs n >= 1");
  if (n == 1) return Eigen::VectorXd::Constant(1, a);
  return Eigen::VectorXd::LinSpaced(n, a, b);
}

}  // namespace gpdr::numeric
