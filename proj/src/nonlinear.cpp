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

#include "gpdr/nonlinear.hpp"

#include <cmath>

#include "gpdr/embed.hpp"
#include "gpdr/errors.hpp"
#include "gpdr/linalg.hpp"
#include "gpdr/numeric.hpp"
#include "gpdr/rng.hpp"

namespace gpdr {

namespace {

constexpr double kTwoPi = 6.28318530717958647692;
constexpr double kMaxJitter = 1e-4;

}  // namespace

LinkBasis LinkBasis::monomials(int degree, double tau2) {
  LinkBasis basis;
  basis.degree = degree;
  basis.prior_var = tau2;
  basis.prior_mean = Eigen::VectorXd::Zero(degree);
  if (degree >= 2) basis.prior_mean(1) = 1.0;  // centered on the identity link
  basis.validate();
  return basis;
}

void LinkBasis::validate() const {
  if (degree < 2) throw config_error("link basis needs degree >= 2");
  if (prior_mean.size() != degree)
    throw config_error("link basis prior mean length mismatch");
  if (!(prior_var > 0.0)) throw config_error("link basis needs prior_var > 0");
}

Eigen::MatrixXd LinkBasis::design(const Eigen::VectorXd& index) const {
  Eigen::MatrixXd phi(index.size(), degree);
  phi.col(0).setOnes();
  for (int r = 1; r < degree; ++r)
    phi.col(r) = phi.col(r - 1).cwiseProduct(index);
  return phi;
}

double LinkBasis::eval(const Eigen::VectorXd& gamma, double x) const {
  double acc = 0.0;
  for (Eigen::Index r = gamma.size() - 1; r >= 0; --r) acc = acc * x + gamma(r);
  return acc;
}

NonlinearChain fit_nonlinear_mcmc(const Dataset& ds, const KernelSpec& spec,
                                  const LinkBasis& basis, int iters, int burnin,
                                  std::uint64_t seed,
                                  const NonlinearOptions& options) {
  ds.validate();
  spec.validate();
  basis.validate();
  if (burnin < 0 || iters <= burnin)
    throw config_error("fit_nonlinear_mcmc needs iters > burnin >= 0");
  if (options.fixed_gamma && options.fixed_gamma->size() != basis.degree)
    throw config_error("fixed_gamma length must equal basis degree");
  if (options.fixed_sigma2 && !(*options.fixed_sigma2 > 0.0))
    throw config_error("fixed_sigma2 must be positive");

  const int n = ds.size();
  const int degree = basis.degree;
  const Eigen::VectorXd y = ds.outcomes();
  const Eigen::MatrixXd m = average_gram(spec, ds).m;
  const CholeskyResult m_chol =
      cholesky_ladder(m, 1e-8, kMaxJitter, "fit_nonlinear_mcmc prior");
  const Eigen::MatrixXd m_lower = m_chol.llt.matrixL();

  rng::Rng gen(seed);
  // N(0, M^{-1}) draw: solve L' nu = z for the lower factor L of M.
  auto prior_draw = [&]() {
    Eigen::VectorXd z(n);
    for (int i = 0; i < n; ++i) z(i) = gen.normal();
    return m_lower.transpose()
        .triangularView<Eigen::Upper>()
        .solve(z)
        .eval();
  };

  double sigma2 =
      options.fixed_sigma2 ? *options.fixed_sigma2 : options.sigma2_init;
  if (!(sigma2 > 0.0)) throw config_error("sigma2_init must be positive");

  // Warm start at the identity-link conjugate solution on centered outcomes;
  // a cold prior start can strand the chain in a flat-link mode where the
  // index carries no signal.
  const double warm_ridge = std::min(sigma2, 1.0);
  Eigen::MatrixXd warm = m;
  warm.diagonal().array() += warm_ridge + m_chol.jitter;
  Eigen::VectorXd w = Eigen::LLT<Eigen::MatrixXd>(warm).solve(
      (y.array() - y.mean()).matrix());
  Eigen::VectorXd gamma =
      options.fixed_gamma ? *options.fixed_gamma : basis.prior_mean;
  if (!options.fixed_gamma) gamma(0) = y.mean();

  auto residual_ss = [&](const Eigen::VectorXd& w_value,
                         const Eigen::VectorXd& gamma_value) {
    const Eigen::VectorXd index = m * w_value;
    return (y - basis.design(index) * gamma_value).squaredNorm();
  };

  NonlinearChain chain;
  chain.w_draws.resize(iters, n);
  chain.gamma_draws.resize(iters, degree);
  chain.sigma2_draws.resize(iters);
  chain.log_posterior.resize(iters);
  chain.burnin = burnin;
  chain.seed = seed;

  int sigma2_accepts = 0;
  int sigma2_proposals = 0;

  for (int it = 0; it < iters; ++it) {
    // (1) Elliptical slice move on w; rejection-free under the exact
    // Gaussian prior.
    {
      const double inv2s = 0.5 / sigma2;
      double log_y = -residual_ss(w, gamma) * inv2s +
                     std::log(gen.uniform_positive());
      const Eigen::VectorXd nu = prior_draw();
      double theta = gen.uniform() * kTwoPi;
      double theta_min = theta - kTwoPi;
      double theta_max = theta;
      for (int contraction = 0;; ++contraction) {
        const Eigen::VectorXd proposal =
            w * std::cos(theta) + nu * std::sin(theta);
        if (-residual_ss(proposal, gamma) * inv2s > log_y) {
          w = proposal;
          break;
        }
        if (contraction > 200 || theta_max - theta_min < 1e-14)
          throw numeric_error(
              "fit_nonlinear_mcmc: slice bracket shrank to nothing "
              "(non-finite or degenerate likelihood?)");
        if (theta < 0.0)
          theta_min = theta;
        else
          theta_max = theta;
        theta = theta_min + gen.uniform() * (theta_max - theta_min);
      }
    }

    const Eigen::VectorXd index = m * w;
    const Eigen::MatrixXd phi = basis.design(index);

    // (2) Conjugate Gaussian draw of gamma | w, sigma2.
    if (!options.fixed_gamma) {
      Eigen::MatrixXd precision = phi.transpose() * phi / sigma2;
      precision.diagonal().array() += 1.0 / basis.prior_var;
      const Eigen::LLT<Eigen::MatrixXd> llt(precision);
      if (llt.info() != Eigen::Success)
        throw numeric_error("gamma update: precision factorization failed");
      const Eigen::VectorXd mean_rhs =
          phi.transpose() * y / sigma2 + basis.prior_mean / basis.prior_var;
      const Eigen::VectorXd mean = llt.solve(mean_rhs);
      Eigen::VectorXd z(degree);
      for (int r = 0; r < degree; ++r) z(r) = gen.normal();
      gamma = mean + Eigen::MatrixXd(llt.matrixL())
                         .transpose()
                         .triangularView<Eigen::Upper>()
                         .solve(z);
    }

    // (3) Random-walk Metropolis on log sigma2 (flat prior in the log,
    // i.e. 1/sigma2 on sigma2).
    const double rss = (y - phi * gamma).squaredNorm();
    if (!options.fixed_sigma2) {
      ++sigma2_proposals;
      const double u = std::log(sigma2);
      const double u_prop = u + options.log_sigma2_step * gen.normal();
      const double log_ratio = -0.5 * n * (u_prop - u) -
                               0.5 * rss * (std::exp(-u_prop) - std::exp(-u));
      if (std::log(gen.uniform_positive()) < log_ratio) {
        sigma2 = std::exp(u_prop);
        ++sigma2_accepts;
      }
    }

    chain.w_draws.row(it) = w.transpose();
    chain.gamma_draws.row(it) = gamma.transpose();
    chain.sigma2_draws(it) = sigma2;
    chain.log_posterior(it) =
        -0.5 * n * std::log(kTwoPi * sigma2) -
        0.5 * (y - phi * gamma).squaredNorm() / sigma2 -
        0.5 * w.dot(m * w) -
        0.5 * (gamma - basis.prior_mean).squaredNorm() / basis.prior_var -
        std::log(sigma2);
    if (!std::isfinite(chain.log_posterior(it)))
      throw numeric_error("fit_nonlinear_mcmc: non-finite log posterior at "
                          "iteration " +
                          std::to_string(it));
  }
  chain.sigma2_accept_rate =
      sigma2_proposals == 0
          ? 0.0
          : static_cast<double>(sigma2_accepts) / sigma2_proposals;
  return chain;
}

ChainSummary summarize_chain(const NonlinearChain& chain, const Dataset& ds,
                             const KernelSpec& spec, const Eigen::MatrixXd& grid,
                             double prob_lo, double prob_hi, int link_points) {
  if (chain.retained() < 1)
    throw config_error("summarize_chain: no retained draws");
  if (link_points < 2) throw config_error("summarize_chain: link_points >= 2");
  const int n = ds.size();
  if (chain.w_draws.cols() != n)
    throw config_error("summarize_chain: chain/dataset size mismatch");
  const int kept = chain.retained();

  const Eigen::MatrixXd m = average_gram(spec, ds).m;
  const Eigen::MatrixXd lx = cross_matrix(spec, ds, grid);
  const auto g = static_cast<int>(grid.rows());

  Eigen::MatrixXd f_std(kept, g);
  Eigen::VectorXd offsets(kept), scales(kept);
  double index_lo = std::numeric_limits<double>::infinity();
  double index_hi = -std::numeric_limits<double>::infinity();

  for (int r = 0; r < kept; ++r) {
    const Eigen::VectorXd w = chain.w_draws.row(chain.burnin + r).transpose();
    const Eigen::VectorXd index = m * w;
    const double a = index.mean();
    double b = std::sqrt((index.array() - a).square().mean());
    if (!(b > 0.0)) b = 1.0;  // degenerate index; keep the map well-defined
    offsets(r) = a;
    scales(r) = b;
    if (g > 0) f_std.row(r) = ((lx.transpose() * w).array() - a).transpose() / b;
    const Eigen::ArrayXd standardized = (index.array() - a) / b;
    index_lo = std::min(index_lo, standardized.minCoeff());
    index_hi = std::max(index_hi, standardized.maxCoeff());
  }

  ChainSummary summary;
  summary.f_grid = g > 0 ? Eigen::VectorXd(grid.col(0)) : Eigen::VectorXd(0);
  summary.f_mean.resize(g);
  summary.f_lo.resize(g);
  summary.f_hi.resize(g);
  std::vector<double> column(static_cast<std::size_t>(kept));
  for (int c = 0; c < g; ++c) {
    for (int r = 0; r < kept; ++r)
      column[static_cast<std::size_t>(r)] = f_std(r, c);
    summary.f_mean(c) = f_std.col(c).mean();
    summary.f_lo(c) = numeric::quantile(column, prob_lo);
    summary.f_hi(c) = numeric::quantile(column, prob_hi);
  }

  summary.link_grid = numeric::linspace(index_lo, index_hi, link_points);
  summary.link_mean.resize(link_points);
  summary.link_lo.resize(link_points);
  summary.link_hi.resize(link_points);
  LinkBasis eval_basis;  // monomial evaluation; prior fields unused here
  eval_basis.degree = static_cast<int>(chain.gamma_draws.cols());
  Eigen::MatrixXd link_vals(kept, link_points);
  for (int r = 0; r < kept; ++r) {
    const Eigen::VectorXd gamma = chain.gamma_draws.row(chain.burnin + r).transpose();
    for (int c = 0; c < link_points; ++c)
      link_vals(r, c) = eval_basis.eval(
          gamma, offsets(r) + scales(r) * summary.link_grid(c));
  }
  for (int c = 0; c < link_points; ++c) {
    for (int r = 0; r < kept; ++r)
      column[static_cast<std::size_t>(r)] = link_vals(r, c);
    summary.link_mean(c) = link_vals.col(c).mean();
    summary.link_lo(c) = numeric::quantile(column, prob_lo);
    summary.link_hi(c) = numeric::quantile(column, prob_hi);
  }
  return summary;
}

}  // namespace gpdr
