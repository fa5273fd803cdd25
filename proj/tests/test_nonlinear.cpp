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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "gpdr/errors.hpp"
#include "gpdr/exact.hpp"
#include "gpdr/nonlinear.hpp"
#include "gpdr/numeric.hpp"
#include "gpdr/rng.hpp"
#include "gpdr/sim.hpp"
#include "support/test_helpers.hpp"

using gpdr::Dataset;
using gpdr::KernelSpec;
using gpdr::LinkBasis;
using gpdr::NonlinearChain;
using gpdr::NonlinearOptions;
using gpdr::testing::random_dataset;

namespace {

KernelSpec gaussian_quarter() {
  KernelSpec spec;
  spec.family = gpdr::KernelFamily::gaussian;
  spec.lengthscale = 0.25;
  spec.dim = 1;
  return spec;
}

Eigen::VectorXd identity_gamma() {
  Eigen::VectorXd gamma(2);
  gamma << 0.0, 1.0;
  return gamma;
}

Eigen::MatrixXd grid1(int n) {
  Eigen::MatrixXd grid(n, 1);
  grid.col(0) = gpdr::numeric::linspace(0.0, 1.0, n);
  return grid;
}

// batch-means standard error of the chain mean
double batch_se(const Eigen::VectorXd& values, int batches) {
  const int len = static_cast<int>(values.size()) / batches;
  Eigen::VectorXd means(batches);
  for (int b = 0; b < batches; ++b)
    means(b) = values.segment(b * len, len).mean();
  const double grand = means.mean();
  const double var = (means.array() - grand).square().sum() / (batches - 1);
  return std::sqrt(var / batches);
}

}  // namespace

TEST_CASE("link basis design and defaults") {
  const LinkBasis basis = LinkBasis::monomials(4, 4.0);
  CHECK(basis.prior_mean(0) == 0.0);
  CHECK(basis.prior_mean(1) == 1.0);
  CHECK(basis.prior_mean(3) == 0.0);
  Eigen::VectorXd index(2);
  index << 2.0, -1.0;
  const Eigen::MatrixXd phi = basis.design(index);
  CHECK(phi(0, 0) == 1.0);
  CHECK(phi(0, 3) == 8.0);
  CHECK(phi(1, 2) == 1.0);
  Eigen::VectorXd gamma(4);
  gamma << 1.0, 2.0, 0.0, -1.0;
  CHECK(basis.eval(gamma, 2.0) == doctest::Approx(1.0 + 4.0 - 8.0));
  CHECK_THROWS_AS(LinkBasis::monomials(1), gpdr::config_error);
}

TEST_CASE("sampler argument validation") {
  const Dataset ds = random_dataset(4, 3, 1);
  const LinkBasis basis = LinkBasis::monomials(3);
  CHECK_THROWS_AS(gpdr::fit_nonlinear_mcmc(ds, gaussian_quarter(), basis, 10,
                                           10, 1),
                  gpdr::config_error);
  CHECK_THROWS_AS(gpdr::fit_nonlinear_mcmc(ds, gaussian_quarter(), basis, 10,
                                           -1, 1),
                  gpdr::config_error);
}

TEST_CASE("pathological outcomes fail as a numeric error, not a hang") {
  Dataset ds = random_dataset(4, 3, 2);
  ds.subjects[0].outcome = 1e200;  // residual overflows to inf
  CHECK_THROWS_AS(gpdr::fit_nonlinear_mcmc(ds, gaussian_quarter(),
                                           LinkBasis::monomials(3), 50, 10, 1),
                  gpdr::numeric_error);
}

TEST_CASE("identical seeds give bit-identical chains") {
  const Dataset ds = random_dataset(5, 4, 9, 0.5);
  const LinkBasis basis = LinkBasis::monomials(3);
  const NonlinearChain a =
      gpdr::fit_nonlinear_mcmc(ds, gaussian_quarter(), basis, 500, 100, 42);
  const NonlinearChain b =
      gpdr::fit_nonlinear_mcmc(ds, gaussian_quarter(), basis, 500, 100, 42);
  CHECK((a.w_draws - b.w_draws).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a.gamma_draws - b.gamma_draws).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a.sigma2_draws - b.sigma2_draws).cwiseAbs().maxCoeff() == 0.0);
  CHECK(a.size() == 500);
  CHECK(a.retained() == 400);
  CHECK((a.sigma2_draws.array() > 0.0).all());
  CHECK(a.log_posterior.allFinite());
}

TEST_CASE("flat likelihood recovers the N(0, M^-1) prior") {
  const Dataset ds = random_dataset(4, 3, 17, 0.3);
  const KernelSpec spec = gaussian_quarter();
  NonlinearOptions options;
  options.fixed_gamma = identity_gamma();
  options.fixed_sigma2 = 1e8;  // likelihood carries no information
  const int iters = 30000;
  const NonlinearChain chain = gpdr::fit_nonlinear_mcmc(
      ds, spec, LinkBasis::monomials(2), iters, 0, 7, options);

  const Eigen::MatrixXd m = gpdr::average_gram(spec, ds).m;
  const Eigen::MatrixXd prior_cov = m.inverse();
  for (int i = 0; i < ds.size(); ++i) {
    const Eigen::VectorXd draws = chain.w_draws.col(i);
    const double sd = std::sqrt(prior_cov(i, i));
    CHECK(std::abs(draws.mean()) <=
          4.0 * sd / std::sqrt(static_cast<double>(iters)));
    const double var_hat =
        (draws.array() - draws.mean()).square().sum() / (iters - 1);
    CHECK(std::abs(var_hat - prior_cov(i, i)) <=
          4.0 * prior_cov(i, i) *
              std::sqrt(2.0 / static_cast<double>(iters)));
  }
}

TEST_CASE("identity-link clamp matches the conjugate posterior") {
  const Dataset ds = random_dataset(8, 5, 23, 0.7);
  const KernelSpec spec = gaussian_quarter();
  const double sigma2 = 0.05;
  NonlinearOptions options;
  options.fixed_gamma = identity_gamma();
  options.fixed_sigma2 = sigma2;
  const int iters = 24000, burnin = 4000;
  const NonlinearChain chain = gpdr::fit_nonlinear_mcmc(
      ds, spec, LinkBasis::monomials(2), iters, burnin, 11, options);

  gpdr::FitConfig cfg;
  cfg.sigma2 = sigma2;
  cfg.jitter = 0.0;
  const Eigen::MatrixXd grid = grid1(21);
  const Eigen::VectorXd exact_mean =
      fit_exact(ds, spec, cfg).posterior_mean(grid);

  const Eigen::MatrixXd lx = gpdr::cross_matrix(spec, ds, grid);
  const int kept = chain.retained();
  Eigen::MatrixXd f_draws(kept, 21);
  for (int r = 0; r < kept; ++r)
    f_draws.row(r) =
        (lx.transpose() * chain.w_draws.row(burnin + r).transpose()).transpose();
  for (int g = 0; g < 21; ++g) {
    const double se = batch_se(f_draws.col(g), 50);
    CHECK(std::abs(f_draws.col(g).mean() - exact_mean(g)) <= 3.0 * se);
  }
}

TEST_CASE("constant chain summarizes to zero-width bands") {
  const Dataset ds = random_dataset(5, 3, 29, 0.5);
  const KernelSpec spec = gaussian_quarter();
  NonlinearChain chain;
  chain.burnin = 0;
  chain.seed = 0;
  const int iters = 50;
  Eigen::VectorXd w(5);
  w << 0.4, -0.2, 0.1, 0.6, -0.5;
  Eigen::VectorXd gamma(3);
  gamma << 0.1, 1.2, -0.3;
  chain.w_draws = w.transpose().replicate(iters, 1);
  chain.gamma_draws = gamma.transpose().replicate(iters, 1);
  chain.sigma2_draws = Eigen::VectorXd::Constant(iters, 0.1);
  chain.log_posterior = Eigen::VectorXd::Zero(iters);

  const auto summary = gpdr::summarize_chain(chain, ds, spec, grid1(11));
  CHECK((summary.f_hi - summary.f_lo).cwiseAbs().maxCoeff() <= 1e-14);
  CHECK((summary.f_mean - summary.f_lo).cwiseAbs().maxCoeff() <= 1e-14);
  CHECK((summary.link_hi - summary.link_lo).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("summaries are exactly invariant to index rescaling") {
  const Dataset ds = random_dataset(6, 4, 31, 0.5);
  const KernelSpec spec = gaussian_quarter();
  const LinkBasis basis = LinkBasis::monomials(3);
  const NonlinearChain chain =
      gpdr::fit_nonlinear_mcmc(ds, spec, basis, 300, 50, 13);

  // w -> 2w with the compensating link gamma_r -> gamma_r / 2^(r-1)
  NonlinearChain scaled = chain;
  scaled.w_draws *= 2.0;
  for (int r = 0; r < scaled.gamma_draws.cols(); ++r)
    scaled.gamma_draws.col(r) /= std::pow(2.0, r);

  const auto a = gpdr::summarize_chain(chain, ds, spec, grid1(9));
  const auto b = gpdr::summarize_chain(scaled, ds, spec, grid1(9));
  CHECK((a.f_mean - b.f_mean).cwiseAbs().maxCoeff() <= 1e-10);
  CHECK((a.f_lo - b.f_lo).cwiseAbs().maxCoeff() <= 1e-10);
  CHECK((a.f_hi - b.f_hi).cwiseAbs().maxCoeff() <= 1e-10);
  CHECK((a.link_grid - b.link_grid).cwiseAbs().maxCoeff() <= 1e-10);
  CHECK((a.link_mean - b.link_mean).cwiseAbs().maxCoeff() <= 1e-10);
  CHECK((a.link_lo - b.link_lo).cwiseAbs().maxCoeff() <= 1e-10);
  CHECK((a.link_hi - b.link_hi).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("exp-link data: link recovered as increasing, exp-compatible") {
  // y = exp(E_Z f0) + noise at the small-simulation scale; the link is
  // identified only up to an affine map of its argument, so the band check
  // asks whether some exp curve fits inside the 95% band
  const KernelSpec spec = gaussian_quarter();
  const gpdr::LinkBasis basis = gpdr::LinkBasis::monomials(4);
  int monotone_hits = 0;
  int band_hits = 0;
  for (int seed = 0; seed < 10; ++seed) {
    auto [ds, truth] = gpdr::generate_dataset(
        gpdr::Regime::dp(25.0), 20, 25, "sine", 0.0,
        gpdr::rng::derive(99, {static_cast<std::uint64_t>(seed)}));
    gpdr::rng::Rng noise(gpdr::rng::derive(98, {static_cast<std::uint64_t>(seed)}));
    for (int i = 0; i < ds.size(); ++i)
      ds.subjects[i].outcome = std::exp(truth[i].e_f0) + 0.1 * noise.normal();
    const NonlinearChain chain = gpdr::fit_nonlinear_mcmc(
        ds, spec, basis, 12000, 3000, 1000 + static_cast<std::uint64_t>(seed));

    const Eigen::MatrixXd m = gpdr::average_gram(spec, ds).m;
    const int kept = chain.retained();
    Eigen::VectorXd eta_bar = Eigen::VectorXd::Zero(ds.size());
    for (int r = 0; r < kept; ++r)
      eta_bar += m * chain.w_draws.row(chain.burnin + r).transpose();
    eta_bar /= kept;
    const double am = eta_bar.mean();
    const double bm = std::sqrt((eta_bar.array() - am).square().mean());
    const Eigen::ArrayXd positions = (eta_bar.array() - am) / bm;
    const Eigen::VectorXd probes = gpdr::numeric::linspace(
        positions.minCoeff(), positions.maxCoeff(), 11);

    Eigen::MatrixXd link(kept, 11);
    for (int r = 0; r < kept; ++r) {
      const Eigen::VectorXd w = chain.w_draws.row(chain.burnin + r).transpose();
      const Eigen::VectorXd eta = m * w;
      const double a = eta.mean();
      const double b = std::sqrt((eta.array() - a).square().mean());
      const Eigen::VectorXd gamma = chain.gamma_draws.row(chain.burnin + r).transpose();
      for (int c = 0; c < 11; ++c)
        link(r, c) = basis.eval(gamma, a + b * probes(c));
    }
    Eigen::VectorXd mean(11), lo(11), hi(11);
    std::vector<double> col(static_cast<std::size_t>(kept));
    for (int c = 0; c < 11; ++c) {
      for (int r = 0; r < kept; ++r) col[static_cast<std::size_t>(r)] = link(r, c);
      mean(c) = link.col(c).mean();
      lo(c) = gpdr::numeric::quantile(col, 0.025);
      hi(c) = gpdr::numeric::quantile(col, 0.975);
    }
    bool monotone = true;
    for (int c = 0; c + 1 < 11; ++c)
      if (mean(c + 1) <= mean(c)) monotone = false;
    monotone_hits += monotone;

    // affine-calibrated exp: least squares of log(mean) on the probes
    bool positive = (mean.array() > 0.0).all();
    if (positive) {
      Eigen::MatrixXd design(11, 2);
      design.col(0).setOnes();
      design.col(1) = probes;
      const Eigen::VectorXd ab =
          (design.transpose() * design)
              .ldlt()
              .solve(design.transpose() * mean.array().log().matrix());
      bool inside = true;
      for (int c = 0; c < 11; ++c) {
        const double fitted = std::exp(ab(0) + ab(1) * probes(c));
        if (fitted < lo(c) || fitted > hi(c)) inside = false;
      }
      band_hits += inside;
    }
  }
  CHECK(monotone_hits >= 8);
  CHECK(band_hits >= 8);
}

TEST_CASE("free sampler mixes on conforming data") {
  // y = exp(index) + noise with f0R = sine; smoke-level checks only
  const auto [ds, truth] = gpdr::generate_dataset(
      gpdr::Regime::dp(25.0), 12, 20, "sine", 0.0, 5);
  Dataset warped = ds;
  for (auto& s : warped.subjects) s.outcome = std::exp(s.outcome) + 0.01;
  const NonlinearChain chain = gpdr::fit_nonlinear_mcmc(
      warped, gaussian_quarter(), LinkBasis::monomials(4), 2000, 500, 3);
  CHECK(chain.sigma2_accept_rate > 0.0);
  CHECK(chain.sigma2_accept_rate < 1.0);
  const auto summary =
      gpdr::summarize_chain(chain, warped, gaussian_quarter(), grid1(15));
  CHECK(summary.f_mean.allFinite());
  CHECK(summary.link_mean.allFinite());
  CHECK((summary.link_hi - summary.link_lo).minCoeff() >= 0.0);
}
