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

#include "gpdr/exact.hpp"

#include <Eigen/QR>
#include <cmath>
#include <utility>

#include "gpdr/errors.hpp"
#include "gpdr/linalg.hpp"
#include "gpdr/rng.hpp"

namespace gpdr {

namespace {

constexpr double kMaxJitter = 1e-4;
constexpr double kSamplingJitter = 1e-10;
constexpr double kLog2Pi = 1.8378770664093454836;

AveragedGram build_gram(const Dataset& ds, const KernelSpec& spec,
                        const FitConfig& cfg) {
  if (cfg.provider == GramProvider::empirical)
    return average_gram(spec, ds, cfg.threads);
  return kde_average_gram(spec, ds, cfg.bandwidth, cfg.allow_quadrature,
                          cfg.threads);
}

}  // namespace

void FitConfig::validate() const {
  if (!(sigma2 > 0.0)) throw config_error("sigma2 must be positive");
  if (jitter < 0.0) throw config_error("jitter must be nonnegative");
}

ExactPosterior ExactPosterior::build(Dataset ds, const KernelSpec& spec,
                                     const FitConfig& cfg, AveragedGram gram,
                                     Eigen::VectorXd y) {
  spec.validate();
  cfg.validate();
  ds.validate();
  const int n = ds.size();
  if (y.size() != n)
    throw config_error("outcome vector length does not match dataset");

  ExactPosterior post;
  post.ds_ = std::move(ds);
  post.spec_ = spec;
  post.cfg_ = cfg;
  post.gram_ = std::move(gram);
  post.y_ = std::move(y);

  Eigen::MatrixXd a = post.gram_.m;
  a.diagonal().array() += cfg.sigma2;
  CholeskyResult chol =
      cholesky_ladder(a, cfg.jitter, kMaxJitter, "fit_exact");
  post.llt_ = std::move(chol.llt);
  post.jitter_ = chol.jitter;
  post.alpha_ = post.llt_.solve(post.y_);
  return post;
}

ExactPosterior fit_exact(const Dataset& ds, const KernelSpec& spec,
                         const FitConfig& cfg) {
  spec.validate();
  cfg.validate();
  ds.validate();
  Eigen::VectorXd y = ds.outcomes();
  return ExactPosterior::build(ds, spec, cfg, build_gram(ds, spec, cfg),
                               std::move(y));
}

Eigen::MatrixXd ExactPosterior::grid_cross(const Eigen::MatrixXd& grid) const {
  if (cfg_.provider == GramProvider::empirical)
    return cross_matrix(spec_, ds_, grid, cfg_.threads);
  // Training-side KDE smoothing; the query point stays a Dirac at s.
  Eigen::MatrixXd out(ds_.size(), grid.rows());
  for (Eigen::Index g = 0; g < grid.rows(); ++g) {
    const Eigen::VectorXd point = grid.row(g).transpose();
    for (int i = 0; i < ds_.size(); ++i) {
      const Eigen::VectorXd xi =
          ds_.subjects[static_cast<std::size_t>(i)].samples.col(0);
      out(i, g) = kde_subject_kernel(
          spec_, point, 0.0, xi, gram_.bandwidths[static_cast<std::size_t>(i)],
          cfg_.allow_quadrature);
    }
  }
  return out;
}

Eigen::VectorXd ExactPosterior::posterior_mean(const Eigen::MatrixXd& grid) const {
  if (grid.rows() == 0) return Eigen::VectorXd(0);
  return grid_cross(grid).transpose() * alpha_;
}

Eigen::MatrixXd ExactPosterior::posterior_cov(const Eigen::MatrixXd& grid) const {
  if (grid.rows() == 0) return Eigen::MatrixXd(0, 0);
  const Eigen::MatrixXd l = grid_cross(grid);
  const Eigen::MatrixXd solved = llt_.solve(l);
  Eigen::MatrixXd cov = gram(spec_, grid) - l.transpose() * solved;
  cov = 0.5 * (cov + cov.transpose()).eval();
  return cov;
}

Eigen::MatrixXd ExactPosterior::sample_posterior(const Eigen::MatrixXd& grid,
                                                 int n_draws,
                                                 std::uint64_t seed) const {
  if (n_draws < 0) throw config_error("sample_posterior needs n_draws >= 0");
  const Eigen::Index g = grid.rows();
  Eigen::MatrixXd draws(n_draws, g);
  if (g == 0 || n_draws == 0) return draws;

  const Eigen::VectorXd mean = posterior_mean(grid);
  const Eigen::MatrixXd cov = posterior_cov(grid);
  const CholeskyResult chol =
      cholesky_ladder(cov, kSamplingJitter, kMaxJitter, "sample_posterior");
  const Eigen::MatrixXd lower = chol.llt.matrixL();

  rng::Rng gen(seed);
  Eigen::VectorXd z(g);
  for (int r = 0; r < n_draws; ++r) {
    for (Eigen::Index i = 0; i < g; ++i) z(i) = gen.normal();
    draws.row(r) = (mean + lower * z).transpose();
  }
  return draws;
}

ExactPosterior::Prediction ExactPosterior::predict_outcome(
    const Eigen::MatrixXd& new_samples) const {
  if (new_samples.rows() == 0)
    throw config_error("predict_outcome needs at least one sample");
  if (new_samples.cols() != spec_.dim)
    throw config_error("predict_outcome: sample dimension mismatch");

  Eigen::VectorXd l_new(ds_.size());
  double self = 0.0;
  if (cfg_.provider == GramProvider::empirical) {
    l_new = subject_cross_vector(spec_, ds_, new_samples);
    self = subject_kernel(spec_, new_samples, new_samples);
  } else {
    const Eigen::VectorXd xs = new_samples.col(0);
    const double h_new = cfg_.bandwidth.kind == BandwidthRule::Kind::fixed
                             ? cfg_.bandwidth.fixed_h
                             : silverman_bandwidth(xs);
    for (int i = 0; i < ds_.size(); ++i) {
      const Eigen::VectorXd xi =
          ds_.subjects[static_cast<std::size_t>(i)].samples.col(0);
      l_new(i) = kde_subject_kernel(spec_, xs, h_new, xi,
                                    gram_.bandwidths[static_cast<std::size_t>(i)],
                                    cfg_.allow_quadrature);
    }
    self = kde_subject_kernel(spec_, xs, h_new, xs, h_new, cfg_.allow_quadrature);
  }

  Prediction pred;
  pred.mean = l_new.dot(alpha_);
  pred.variance = self - l_new.dot(llt_.solve(l_new)) + cfg_.sigma2;
  return pred;
}

double ExactPosterior::log_marginal() const {
  const auto n = static_cast<double>(ds_.size());
  const Eigen::MatrixXd lower = llt_.matrixL();
  double log_det = 0.0;
  for (Eigen::Index i = 0; i < lower.rows(); ++i)
    log_det += std::log(lower(i, i));
  return -0.5 * y_.dot(alpha_) - log_det - 0.5 * n * kLog2Pi;
}

double log_marginal_likelihood(const Dataset& ds, const KernelSpec& spec,
                               const FitConfig& cfg) {
  return fit_exact(ds, spec, cfg).log_marginal();
}

HyperSearchResult select_hyperparams(const Dataset& ds,
                                     const std::vector<HyperGridPoint>& grid,
                                     const FitConfig& base) {
  if (grid.empty()) throw config_error("hyperparameter grid is empty");
  HyperSearchResult result;
  result.log_marginals.reserve(grid.size());

  AveragedGram cached;
  bool have_cached = false;
  KernelSpec cached_spec;
  const Eigen::VectorXd y = ds.outcomes();

  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto& point = grid[i];
    const bool same_spec = have_cached &&
                           cached_spec.family == point.spec.family &&
                           cached_spec.lengthscale == point.spec.lengthscale &&
                           cached_spec.smoothness == point.spec.smoothness &&
                           cached_spec.dim == point.spec.dim;
    if (!same_spec) {
      cached = build_gram(ds, point.spec, base);
      cached_spec = point.spec;
      have_cached = true;
    }
    FitConfig cfg = base;
    cfg.sigma2 = point.sigma2;
    const double lml =
        ExactPosterior::build(ds, point.spec, cfg, cached, y).log_marginal();
    result.log_marginals.push_back(lml);
    if (lml > best) {
      best = lml;
      result.best_index = static_cast<int>(i);
      result.best_spec = point.spec;
      result.best_sigma2 = point.sigma2;
    }
  }
  return result;
}

CovariateFit fit_with_covariates(const Dataset& ds, const Eigen::MatrixXd& w,
                                 const KernelSpec& spec, const FitConfig& cfg) {
  spec.validate();
  cfg.validate();
  ds.validate();
  const int n = ds.size();
  const Eigen::Index p = w.cols();
  if (w.rows() != n)
    throw config_error("covariate matrix W must have one row per subject");
  if (p == 0) return {Eigen::VectorXd(0), fit_exact(ds, spec, cfg)};
  if (p >= n) throw config_error("covariate fit needs p < n");
  if (Eigen::ColPivHouseholderQR<Eigen::MatrixXd>(w).rank() < p)
    throw config_error("covariate matrix W is rank deficient");

  AveragedGram gram = build_gram(ds, spec, cfg);
  Eigen::MatrixXd a = gram.m;
  a.diagonal().array() += cfg.sigma2;
  CholeskyResult chol =
      cholesky_ladder(a, cfg.jitter, kMaxJitter, "fit_with_covariates");

  const Eigen::VectorXd y = ds.outcomes();
  const Eigen::MatrixXd a_inv_w = chol.llt.solve(w);
  const Eigen::MatrixXd normal = w.transpose() * a_inv_w;  // p x p, PD
  const Eigen::VectorXd rhs = a_inv_w.transpose() * y;

  Eigen::VectorXd beta = Eigen::LLT<Eigen::MatrixXd>(normal).solve(rhs);
  Eigen::VectorXd residual = y - w * beta;
  return {std::move(beta), ExactPosterior::build(ds, spec, cfg, std::move(gram),
                                                 std::move(residual))};
}

}  // namespace gpdr
