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

#ifndef GPDR_NUMERIC_HPP
#define GPDR_NUMERIC_HPP

#include <Eigen/Core>
#include <functional>
#include <utility>
#include <vector>

namespace gpdr::numeric {

/// Trapezoid rule on a uniform grid spanning [a, b] with values.size() nodes.
double trapezoid_uniform(const Eigen::VectorXd& values, double a, double b);

/// Composite Simpson rule for f on [a, b] with n_points nodes (odd, >= 3).
double simpson(const std::function<double(double)>& f, double a, double b,
               int n_points);

/// Gauss-Hermite nodes/weights for weight exp(-t^2) via Golub-Welsch.
std::pair<Eigen::VectorXd, Eigen::VectorXd> gauss_hermite(int n_nodes);

/// Linear-interpolation sample quantile (R type 7). p in [0, 1].
double quantile(std::vector<double> sorted_or_not, double p);

double mean(const Eigen::VectorXd& v);
/// Unbiased sample variance (divides by n - 1); 0 for n < 2.
double sample_variance(const Eigen::VectorXd& v);

/// Uniform grid with n points from a to b inclusive.
Eigen::VectorXd linspace(double a, double b, int n);

}  // namespace gpdr::numeric

#endif  // GPDR_NUMERIC_HPP
