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

#ifndef GPDR_KERNEL_HPP
#define GPDR_KERNEL_HPP

#include <Eigen/Core>
#include <string>

namespace gpdr {

enum class KernelFamily { gaussian, matern };

std::string to_string(KernelFamily family);
KernelFamily kernel_family_from_string(const std::string& name);

/// Stationary, isotropic, unit-variance covariance kernel on R^d.
///
/// The Gaussian form is K(s,t) = exp(-|s-t|^2 / (2 l)) with l the
/// `lengthscale` field (a variance-like parameter, not its square root).
/// The Matern form uses the closed-form half-integer orders
/// nu in {0.5, 1.5, 2.5} with range parameter `lengthscale`, normalized
/// so K(s,s) = 1. Immutable once validated; all evaluations are pure.
struct KernelSpec {
  KernelFamily family = KernelFamily::gaussian;
  double lengthscale = 1.0;
  double smoothness = 2.5;  // Matern order nu; ignored for Gaussian
  int dim = 1;

  /// Throws config_error on non-positive lengthscale, unsupported Matern
  /// order, or dim < 1.
  void validate() const;
};

/// K as a function of the distance r = |s - t| >= 0.
double kernel_value(const KernelSpec& spec, double r);

/// K(s, t). Throws config_error if either point's dimension differs
/// from spec.dim.
double kernel_eval(const KernelSpec& spec, const Eigen::VectorXd& s,
                   const Eigen::VectorXd& t);

/// Cross Gram matrix; rows index A's points, columns B's points. Points are
/// matrix rows. Empty inputs yield an empty matrix. When A and B hold
/// identical point sets the lower triangle is computed and mirrored so the
/// result is exactly symmetric.
Eigen::MatrixXd gram(const KernelSpec& spec, const Eigen::MatrixXd& a,
                     const Eigen::MatrixXd& b);

/// Symmetric Gram matrix of one point set (lower triangle mirrored).
Eigen::MatrixXd gram(const KernelSpec& spec, const Eigen::MatrixXd& points);

/// Row of kernel values K(points[i], s) for all i, vectorized over rows.
Eigen::VectorXd kernel_row(const KernelSpec& spec, const Eigen::MatrixXd& points,
                           const Eigen::VectorXd& s);

}  // namespace gpdr

#endif  // GPDR_KERNEL_HPP
