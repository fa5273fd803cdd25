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

#ifndef GPDR_EMBED_HPP
#define GPDR_EMBED_HPP

#include <vector>

#include "gpdr/data.hpp"
#include "gpdr/discrete_distribution.hpp"
#include "gpdr/kernel.hpp"

namespace gpdr {

class DiscreteDistributionRef;

enum class GramProvider { empirical, kde };

std::string to_string(GramProvider provider);
GramProvider gram_provider_from_string(const std::string& name);

/// Per-subject KDE bandwidth choice: Silverman's rule
/// h = 0.9 * A * m^(-1/5) with the bw.nrd0 spread cascade
/// A = min(sd, IQR/1.34), falling back to sd when the IQR collapses and to
/// the data magnitude (with a warning) for zero-variance subjects; or a
/// fixed value.
struct BandwidthRule {
  enum class Kind { silverman, fixed };
  Kind kind = Kind::silverman;
  double fixed_h = 0.0;

  static BandwidthRule silverman() { return {Kind::silverman, 0.0}; }
  static BandwidthRule fixed(double h) { return {Kind::fixed, h}; }
};

double silverman_bandwidth(const Eigen::VectorXd& samples);
std::vector<double> resolve_bandwidths(const Dataset& ds,
                                       const BandwidthRule& rule);

/// n x n matrix of between-subject averaged kernel values
/// M_ij = mean_{u,v} K(x_iu, x_jv) -- the Gram matrix of (empirical or
/// KDE-smoothed) mean embeddings. Assembled on the lower triangle and
/// mirrored, so it is exactly symmetric.
struct AveragedGram {
  Eigen::MatrixXd m;
  GramProvider provider = GramProvider::empirical;
  std::vector<double> bandwidths;  // empty for the empirical provider
};

/// Empirical averaged Gram. Entries accumulate in sample-index order
/// (u outer, v inner); rows may be assembled in parallel without changing
/// the result.
AveragedGram average_gram(const KernelSpec& spec, const Dataset& ds,
                          int threads = 0);

/// l_i(s) = mean_j K(x_ij, s).
Eigen::VectorXd cross_vector(const KernelSpec& spec, const Dataset& ds,
                             const Eigen::VectorXd& s);

/// n x |grid| matrix with column g equal to cross_vector(grid row g).
Eigen::MatrixXd cross_matrix(const KernelSpec& spec, const Dataset& ds,
                             const Eigen::MatrixXd& grid, int threads = 0);

/// Averaged kernel between two raw sample sets:
/// mean_{u,v} K(a_u, b_v) (the meta-kernel of their empirical measures).
double subject_kernel(const KernelSpec& spec, const Eigen::MatrixXd& a,
                      const Eigen::MatrixXd& b);

/// Component i = subject_kernel(new_samples, subject i's samples).
Eigen::VectorXd subject_cross_vector(const KernelSpec& spec, const Dataset& ds,
                                     const Eigen::MatrixXd& new_samples);

/// KDE-smoothed counterpart of average_gram for 1-D Gaussian kernels:
/// the exact double integral of K against the two subjects' Gaussian KDE
/// densities on R (closed-form convolution). A Matern kernel is rejected
/// unless allow_quadrature enables the slow Simpson fallback.
AveragedGram kde_average_gram(const KernelSpec& spec, const Dataset& ds,
                              const BandwidthRule& rule,
                              bool allow_quadrature = false, int threads = 0);

/// Component i = integral of K(s, x) against subject i's KDE density.
Eigen::VectorXd kde_cross_vector(const KernelSpec& spec, const Dataset& ds,
                                 const BandwidthRule& rule,
                                 const Eigen::VectorXd& s,
                                 bool allow_quadrature = false);

Eigen::MatrixXd kde_cross_matrix(const KernelSpec& spec, const Dataset& ds,
                                 const BandwidthRule& rule,
                                 const Eigen::MatrixXd& grid,
                                 bool allow_quadrature = false,
                                 int threads = 0);

/// KDE-smoothed kernel between two raw sample sets with explicit bandwidths.
double kde_subject_kernel(const KernelSpec& spec, const Eigen::VectorXd& a,
                          double h_a, const Eigen::VectorXd& b, double h_b,
                          bool allow_quadrature = false);

/// Exact squared RKHS distance between the mean embedding of the empirical
/// measure of `samples` and that of the discrete distribution z:
/// KK(Zhat,Zhat) - 2 KK(Zhat,Z) + KK(Z,Z). Nonnegative up to roundoff.
double embedding_distance_sq(const KernelSpec& spec,
                             const DiscreteDistribution& z,
                             const Eigen::MatrixXd& samples);

}  // namespace gpdr

#endif  // GPDR_EMBED_HPP
