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

#include <cmath>
#include <random>

#include "gpdr/errors.hpp"
#include "gpdr/sim.hpp"

using gpdr::DiscreteDistribution;
using gpdr::Regime;

TEST_CASE("f0 registry") {
  const auto bump = gpdr::f0_lookup("bump10");
  CHECK(bump(0.0) == 0.0);
  CHECK(bump(0.2) == doctest::Approx(2.0 * std::exp(-1.0)).epsilon(1e-12));
  const auto sine = gpdr::f0_lookup("sine");
  CHECK(sine(0.25) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(gpdr::f0_lookup("nope"), gpdr::config_error);
}

TEST_CASE("stick breaking: tiny alpha concentrates on one atom") {
  const DiscreteDistribution z = gpdr::sample_dp(1e-8, 4);
  CHECK(z.weights(0) >= 1.0 - 1e-6);
}

TEST_CASE("stick breaking: weights sum to one") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const DiscreteDistribution z = gpdr::sample_dp(25.0, seed);
    CHECK(std::abs(z.weights.sum() - 1.0) <= 1e-12);
    CHECK((z.weights.array() >= 0.0).all());
    CHECK(z.atoms.minCoeff() >= 0.0);
    CHECK(z.atoms.maxCoeff() <= 1.0);
  }
}

namespace {

// Independent straight-loop stick breaker (std RNG, no truncation logic):
// counts sticks until 99.9% of the mass is assigned.
int oracle_sticks_to_999(double alpha, std::mt19937& gen) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double remaining = 1.0;
  int count = 0;
  while (remaining > 1e-3) {
    const double frac = 1.0 - std::pow(1.0 - unif(gen), 1.0 / alpha);
    remaining *= (1.0 - frac);
    ++count;
  }
  return count;
}

int sticks_to_999(const DiscreteDistribution& z) {
  double acc = 0.0;
  int count = 0;
  for (Eigen::Index k = 0; k < z.weights.size(); ++k) {
    acc += z.weights(k);
    ++count;
    if (acc >= 1.0 - 1e-3) break;
  }
  return count;
}

}  // namespace

TEST_CASE("stick breaking: atom count matches independent oracle (alpha=25)") {
  const int reps = 500;
  double ours = 0.0;
  for (int r = 0; r < reps; ++r)
    ours += sticks_to_999(gpdr::sample_dp(25.0, 1000 + static_cast<std::uint64_t>(r)));
  ours /= reps;

  std::mt19937 gen(77);
  double oracle = 0.0;
  for (int r = 0; r < reps; ++r) oracle += oracle_sticks_to_999(25.0, gen);
  oracle /= reps;

  // Monte-Carlo comparison; per-draw sd of the count is about 13 so the
  // two means agree within a few SE.
  CHECK(std::abs(ours - oracle) < 5.0);
}

TEST_CASE("sample_from_discrete basics") {
  DiscreteDistribution single;
  single.atoms = Eigen::VectorXd::Constant(1, 0.42);
  single.weights = Eigen::VectorXd::Constant(1, 1.0);
  const Eigen::VectorXd draws = gpdr::sample_from_discrete(single, 7, 5);
  CHECK((draws.array() == 0.42).all());

  DiscreteDistribution five;
  five.atoms.resize(5);
  five.atoms << 0.1, 0.3, 0.5, 0.7, 0.9;
  five.weights.resize(5);
  five.weights << 0.1, 0.2, 0.4, 0.25, 0.05;
  const int m = 100000;
  const Eigen::VectorXd big = gpdr::sample_from_discrete(five, m, 11);
  for (int k = 0; k < 5; ++k) {
    const double freq =
        (big.array() == five.atoms(k)).cast<double>().sum() / m;
    CHECK(std::abs(freq - five.weights(k)) < 0.02);
  }

  const Eigen::VectorXd again = gpdr::sample_from_discrete(five, 50, 123);
  CHECK(gpdr::sample_from_discrete(five, 50, 123) == again);
}

TEST_CASE("logit-normal marginal moments hold for all rho") {
  const auto f0 = gpdr::f0_lookup("bump10");
  for (double rho : {0.0, 0.5, 0.8}) {
    const int subjects = 1000;
    const int m = 100;
    Eigen::VectorXd subject_means(subjects), subject_vars(subjects);
    for (int i = 0; i < subjects; ++i) {
      const auto draw = gpdr::sample_logitnormal_subject(
          m, rho, f0, 90000 + static_cast<std::uint64_t>(i) * 7 +
                         static_cast<std::uint64_t>(rho * 10));
      // center by the known subject location so all subjects pool as c = 0;
      // second moments about the true center stay unbiased under AR(1)
      Eigen::ArrayXd g =
          (draw.samples.array() / (1.0 - draw.samples.array())).log() - draw.c;
      subject_means(i) = g.mean();
      subject_vars(i) = g.square().mean();
    }
    const double mean_hat = subject_means.mean();
    const double mean_se =
        std::sqrt((subject_means.array() - mean_hat).square().sum() /
                  (subjects - 1) / subjects);
    CHECK(std::abs(mean_hat - 0.0) <= 4.0 * mean_se);

    const double var_hat = subject_vars.mean();
    const double var_se =
        std::sqrt((subject_vars.array() - var_hat).square().sum() /
                  (subjects - 1) / subjects);
    CHECK(std::abs(var_hat - 0.09) <= 4.0 * var_se);
  }
}

TEST_CASE("logit-normal AR(1) lag-1 autocorrelation") {
  const auto f0 = gpdr::f0_lookup("bump10");
  for (double rho : {0.0, 0.5, 0.8}) {
    const int m = 5000;
    const auto draw = gpdr::sample_logitnormal_subject(
        m, rho, f0, 31 + static_cast<std::uint64_t>(rho * 100));
    Eigen::ArrayXd g =
        (draw.samples.array() / (1.0 - draw.samples.array())).log();
    const double mean = g.mean();
    double num = 0.0, den = 0.0;
    for (int j = 0; j + 1 < m; ++j)
      num += (g(j) - mean) * (g(j + 1) - mean);
    for (int j = 0; j < m; ++j) den += (g(j) - mean) * (g(j) - mean);
    CHECK(std::abs(num / den - rho) < 0.05);
  }
}

TEST_CASE("logit-normal quadrature truth matches big Monte Carlo") {
  const auto f0 = gpdr::f0_lookup("bump10");
  const auto draw = gpdr::sample_logitnormal_subject(10, 0.0, f0, 404);
  std::mt19937_64 gen(8);
  std::normal_distribution<double> norm(draw.c, 0.3);
  const int n_draws = 10000000;
  double acc = 0.0;
  for (int i = 0; i < n_draws; ++i) {
    const double g = norm(gen);
    acc += f0(1.0 / (1.0 + std::exp(-g)));
  }
  CHECK(std::abs(draw.e_f0 - acc / n_draws) < 1e-3);
}

TEST_CASE("logit-normal rejects invalid rho") {
  const auto f0 = gpdr::f0_lookup("bump10");
  CHECK_THROWS_AS(gpdr::sample_logitnormal_subject(5, 1.0, f0, 1),
                  gpdr::config_error);
  CHECK_THROWS_AS(gpdr::sample_logitnormal_subject(5, -0.1, f0, 1),
                  gpdr::config_error);
}

TEST_CASE("generate_dataset: zero noise reproduces truth exactly") {
  const auto [ds, truth] =
      gpdr::generate_dataset(Regime::dp(25.0), 8, 20, "bump10", 0.0, 99);
  for (int i = 0; i < ds.size(); ++i) {
    CHECK(ds.subjects[i].outcome == truth[i].e_f0);
    CHECK(truth[i].y_noiseless == truth[i].e_f0);
  }
}

TEST_CASE("generate_dataset: near-degenerate DP reduces to pointwise f0") {
  const auto f0 = gpdr::f0_lookup("bump10");
  const auto [ds, truth] =
      gpdr::generate_dataset(Regime::dp(1e-8), 10, 1, "bump10", 0.0, 7);
  for (int i = 0; i < ds.size(); ++i)
    CHECK(std::abs(ds.subjects[i].outcome - f0(ds.subjects[i].samples(0, 0))) <
          1e-5);
}

TEST_CASE("generate_dataset: noise variance calibrated") {
  const auto [ds, truth] =
      gpdr::generate_dataset(Regime::dp(25.0), 2000, 2, "bump10", 0.01, 5);
  Eigen::VectorXd noise(ds.size());
  for (int i = 0; i < ds.size(); ++i)
    noise(i) = ds.subjects[i].outcome - truth[i].e_f0;
  const double var = (noise.array() - noise.mean()).square().sum() / (2000 - 1);
  CHECK(var == doctest::Approx(0.01).epsilon(0.10));
}

TEST_CASE("generate_dataset: bit-for-bit determinism and support") {
  for (auto regime : {Regime::dp(25.0), Regime::logitnormal(0.5)}) {
    const auto [ds1, truth1] =
        gpdr::generate_dataset(regime, 12, 30, "sine", 0.01, 321);
    const auto [ds2, truth2] =
        gpdr::generate_dataset(regime, 12, 30, "sine", 0.01, 321);
    REQUIRE(ds1.size() == ds2.size());
    for (int i = 0; i < ds1.size(); ++i) {
      CHECK(ds1.subjects[i].samples == ds2.subjects[i].samples);
      CHECK(ds1.subjects[i].outcome == ds2.subjects[i].outcome);
      CHECK(truth1[i].e_f0 == truth2[i].e_f0);
      CHECK(ds1.subjects[i].samples.minCoeff() >= 0.0);
      CHECK(ds1.subjects[i].samples.maxCoeff() <= 1.0);
    }
  }
}

TEST_CASE("generate_dataset: earlier subjects unaffected by n and m") {
  const auto [small, truth_small] =
      gpdr::generate_dataset(Regime::dp(25.0), 4, 10, "bump10", 0.01, 888);
  const auto [large, truth_large] =
      gpdr::generate_dataset(Regime::dp(25.0), 9, 25, "bump10", 0.01, 888);
  for (int i = 0; i < 4; ++i) {
    CHECK(truth_small[i].e_f0 == truth_large[i].e_f0);
    // the first 10 draws of the longer sample stream coincide
    CHECK(small.subjects[i].samples.col(0) ==
          large.subjects[i].samples.col(0).head(10));
  }
}

TEST_CASE("DP truth expectation agrees with Monte Carlo resampling") {
  const auto f0 = gpdr::f0_lookup("bump10");
  const DiscreteDistribution z = gpdr::sample_dp(25.0, 2024);
  const double exact = z.expectation(f0);
  const int m = 1000000;
  const Eigen::VectorXd draws = gpdr::sample_from_discrete(z, m, 5150);
  Eigen::ArrayXd values(m);
  for (int j = 0; j < m; ++j) values(j) = f0(draws(j));
  const double mc = values.mean();
  const double se = std::sqrt((values - mc).square().sum() / (m - 1.0) / m);
  CHECK(std::abs(exact - mc) <= 4.0 * se);
}
