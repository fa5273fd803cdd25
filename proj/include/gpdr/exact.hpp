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

#ifndef GPDR_EXACT_HPP
#define GPDR_EXACT_HPP

#include <Eigen/Cholesky>
#include <cstdint>
#include <vector>

#include "gpdr/data.hpp"
#include "gpdr/embed.hpp"
#include "gpdr/kernel.hpp"

namespace gpdr {

struct FitConfig {
  double sigma2 = 0.01;
  double jitter = 1e-8;
  GramProvider provider = GramProvider::empirical;
  BandwidthRule bandwidth = BandwidthRule::silverman();
  bool allow_quadrature = false;
  int threads = 0;

  void validate() const;
};

/// Conjugate posterior of the averaged-kernel GP regression: holds the
/// training data, the factorized (M + sigma2 I + jitter I), and the solved
/// representer weights alpha. Immutable after fitting; queries are pure and
/// safe to run concurrently.
class ExactPosterior {
 public:
  /// Posterior mean of f at each grid row: l(s)' alpha.
  Eigen::VectorXd posterior_mean(const Eigen::MatrixXd& grid) const;

  /// Posterior covariance on the grid:
  /// K(s,t) - l(s)' (M + sigma2 I)^{-1} l(t). Exactly symmetric.
  Eigen::MatrixXd posterior_cov(const Eigen::MatrixXd& grid) const;

  /// n_draws x |grid| joint draws from N(mean, cov + 1e-10 I), Cholesky
  /// sampled, deterministic given seed. Empty grid yields n_draws x 0.
  Eigen::MatrixXd sample_posterior(const Eigen::MatrixXd& grid, int n_draws,
                                   std::uint64_t seed) const;

  struct Prediction {
    double mean = 0.0;
    double variance = 0.0;
  };
  /// Predictive outcome distribution for a new subject given its repeated
  /// measures (rows). Variance includes the noise term sigma2.
  Prediction predict_outcome(const Eigen::MatrixXd& new_samples) const;

  double log_marginal() const;

  const Dataset& dataset() const { return ds_; }
  const KernelSpec& kernel() const { return spec_; }
  const FitConfig& config() const { return cfg_; }
  const AveragedGram& averaged_gram() const { return gram_; }
  const Eigen::VectorXd& training_outcomes() const { return y_; }
  const Eigen::VectorXd& alpha() const { return alpha_; }
  Eigen::MatrixXd chol_lower() const { return llt_.matrixL(); }
  double applied_jitter() const { return jitter_; }

  /// Assembles the posterior from a prebuilt Gram and explicit outcome
  /// vector (used by the covariate extension and model loading).
  static ExactPosterior build(Dataset ds, const KernelSpec& spec,
                              const FitConfig& cfg, AveragedGram gram,
                              Eigen::VectorXd y);

 private:
  ExactPosterior() = default;

  /// Cross-provider l-matrix against Dirac points (grid rows).
  Eigen::MatrixXd grid_cross(const Eigen::MatrixXd& grid) const;

  Dataset ds_;
  KernelSpec spec_;
  FitConfig cfg_;
  AveragedGram gram_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  Eigen::VectorXd y_;
  Eigen::VectorXd alpha_;
  double jitter_ = 0.0;
};

/// Fits the conjugate posterior. Cholesky failures escalate through the
/// jitter ladder (x10 up to 1e-4) before raising numeric_error.
ExactPosterior fit_exact(const Dataset& ds, const KernelSpec& spec,
                         const FitConfig& cfg);

double log_marginal_likelihood(const Dataset& ds, const KernelSpec& spec,
                               const FitConfig& cfg);

struct HyperGridPoint {
  KernelSpec spec;
  double sigma2 = 0.01;
};

struct HyperSearchResult {
  int best_index = 0;
  KernelSpec best_spec;
  double best_sigma2 = 0.0;
  std::vector<double> log_marginals;  // aligned with the grid
};

/// Argmax of the log marginal likelihood over the grid; ties keep the first
/// occurrence. The averaged Gram is reused across consecutive grid points
/// that share a kernel spec.
HyperSearchResult select_hyperparams(const Dataset& ds,
                                     const std::vector<HyperGridPoint>& grid,
                                     const FitConfig& base);

struct CovariateFit {
  Eigen::VectorXd beta;
  ExactPosterior posterior;  // GPDR fit on the GLS residuals y - W beta
};

/// Joint fit with additional vector covariates W (n x p, full column rank,
/// p < n): beta is the closed-form GLS estimate under marginal covariance
/// M + sigma2 I, and the returned posterior models the residual structure.
CovariateFit fit_with_covariates(const Dataset& ds, const Eigen::MatrixXd& w,
                                 const KernelSpec& spec, const FitConfig& cfg);

}  // namespace gpdr

#endif  // GPDR_EXACT_HPP
