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

#ifndef GPDR_NONLINEAR_HPP
#define GPDR_NONLINEAR_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "gpdr/data.hpp"
#include "gpdr/kernel.hpp"

namespace gpdr {

/// Monomial basis for the unknown link: phi_r(x) = x^(r-1), r = 1..degree.
/// The Gaussian prior on the coefficients defaults to mean zero except a
/// unit weight on the linear term, covariance tau2 * I.
struct LinkBasis {
  int degree = 4;
  Eigen::VectorXd prior_mean;  // length degree
  double prior_var = 0.25;     // tau2

  static LinkBasis monomials(int degree = 4, double tau2 = 0.25);
  void validate() const;  // degree >= 2, prior sizes consistent

  /// n x degree design matrix of the basis at the index values.
  Eigen::MatrixXd design(const Eigen::VectorXd& index) const;
  double eval(const Eigen::VectorXd& gamma, double x) const;
};

struct NonlinearOptions {
  std::optional<Eigen::VectorXd> fixed_gamma;  // clamp the link coefficients
  std::optional<double> fixed_sigma2;          // clamp the noise variance
  double sigma2_init = 1.0;
  double log_sigma2_step = 0.2;  // random-walk step on log sigma2
};

/// All recorded sweeps of the sampler for y = phi(M w) + eps with
/// w ~ N(0, M^{-1}), gamma ~ N(mu, tau2 I), and a 1/sigma2 prior.
struct NonlinearChain {
  Eigen::MatrixXd w_draws;      // iters x n
  Eigen::MatrixXd gamma_draws;  // iters x degree
  Eigen::VectorXd sigma2_draws;
  Eigen::VectorXd log_posterior;  // unnormalized, for diagnostics
  int burnin = 0;
  std::uint64_t seed = 0;
  double sigma2_accept_rate = 0.0;

  int size() const { return static_cast<int>(w_draws.rows()); }
  /// Row indices kept after burn-in.
  int retained() const { return size() - burnin; }
};

/// Runs the three-block sweep for `iters` iterations: (1) elliptical slice
/// move on w under its exact N(0, M^{-1}) prior, (2) conjugate Gaussian
/// draw of gamma, (3) random-walk Metropolis on log sigma2. Blocks (2)/(3)
/// are skipped when clamped through the options. Deterministic given seed.
NonlinearChain fit_nonlinear_mcmc(const Dataset& ds, const KernelSpec& spec,
                                  const LinkBasis& basis, int iters, int burnin,
                                  std::uint64_t seed,
                                  const NonlinearOptions& options = {});

/// Pointwise posterior summaries with the index-scale ambiguity removed:
/// per draw, the subject index values are standardized to mean zero and
/// unit variance, the same affine map is pushed into the link argument, and
/// only then are means and quantiles taken.
struct ChainSummary {
  Eigen::VectorXd f_grid;  // grid points (1-D)
  Eigen::VectorXd f_mean, f_lo, f_hi;
  Eigen::VectorXd link_grid;  // standardized index points
  Eigen::VectorXd link_mean, link_lo, link_hi;
};

ChainSummary summarize_chain(const NonlinearChain& chain, const Dataset& ds,
                             const KernelSpec& spec, const Eigen::MatrixXd& grid,
                             double prob_lo = 0.05, double prob_hi = 0.95,
                             int link_points = 101);

}  // namespace gpdr

#endif  // GPDR_NONLINEAR_HPP
