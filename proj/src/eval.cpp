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

#include "gpdr/eval.hpp"

#include <algorithm>
#include <cmath>

#include "gpdr/errors.hpp"
#include "gpdr/linalg.hpp"
#include "gpdr/numeric.hpp"
#include "gpdr/parallel.hpp"
#include "gpdr/rng.hpp"

namespace gpdr {

namespace {

// Substream tags for the evaluation lattice.
enum : std::uint64_t {
  kStreamFolds = 11,
  kStreamCellData = 12,
  kStreamCellRisk = 13,
};

double normal_ci_half_width(const std::vector<double>& values) {
  const auto n = static_cast<double>(values.size());
  if (values.size() < 2) return 0.0;
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / (n - 1.0));
  return 1.96 * sd / std::sqrt(n);
}

}  // namespace

double l2_risk(const ExactPosterior& post, const std::string& f0_name,
               std::uint64_t seed, int grid_size, int n_draws) {
  if (post.kernel().dim != 1) throw config_error("l2_risk supports d=1 fits");
  if (grid_size < 2 || n_draws < 1)
    throw config_error("l2_risk needs grid_size >= 2 and n_draws >= 1");
  const auto f0 = f0_lookup(f0_name);
  Eigen::MatrixXd grid(grid_size, 1);
  grid.col(0) = numeric::linspace(0.0, 1.0, grid_size);
  Eigen::VectorXd truth(grid_size);
  for (int i = 0; i < grid_size; ++i) truth(i) = f0(grid(i, 0));

  const Eigen::MatrixXd draws = post.sample_posterior(grid, n_draws, seed);
  double acc = 0.0;
  for (int r = 0; r < n_draws; ++r) {
    const Eigen::VectorXd sq =
        (draws.row(r).transpose() - truth).array().square();
    acc += numeric::trapezoid_uniform(sq, 0.0, 1.0);
  }
  return acc / static_cast<double>(n_draws);
}

double empirical_norm_risk(const ExactPosterior& post,
                           const std::vector<TruthRecord>& truth, int n_draws,
                           std::uint64_t seed) {
  const int n = static_cast<int>(truth.size());
  if (n == 0) throw config_error("empirical_norm_risk needs truth records");
  if (n_draws < 1) throw config_error("empirical_norm_risk needs n_draws >= 1");

  // E_Z fhat is linear in fhat, so the vector (E_{Z_i} fhat)_i is Gaussian:
  // mean LZ' alpha, covariance KK_z - LZ' (M + s2 I)^{-1} LZ with the
  // atom-weighted cross vectors LZ.
  const Dataset& ds = post.dataset();
  const KernelSpec& spec = post.kernel();
  Eigen::MatrixXd lz(ds.size(), n);
  Eigen::MatrixXd meta(n, n);
  std::vector<Eigen::MatrixXd> atom_pts(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const auto& record = truth[static_cast<std::size_t>(i)];
    if (!record.distribution)
      throw config_error(
          "empirical_norm_risk needs discrete-distribution truth records");
    const DiscreteDistribution& z = *record.distribution;
    atom_pts[static_cast<std::size_t>(i)].resize(z.atoms.size(), 1);
    atom_pts[static_cast<std::size_t>(i)].col(0) = z.atoms;
  }
  for (int i = 0; i < n; ++i) {
    const DiscreteDistribution& zi = *truth[static_cast<std::size_t>(i)].distribution;
    lz.col(i) = cross_matrix(spec, ds, atom_pts[static_cast<std::size_t>(i)]) *
                zi.weights;
    for (int j = 0; j <= i; ++j) {
      const DiscreteDistribution& zj =
          *truth[static_cast<std::size_t>(j)].distribution;
      const double v = zi.weights.dot(
          gram(spec, atom_pts[static_cast<std::size_t>(i)],
               atom_pts[static_cast<std::size_t>(j)]) *
          zj.weights);
      meta(i, j) = v;
      meta(j, i) = v;
    }
  }

  Eigen::MatrixXd a = post.averaged_gram().m;
  a.diagonal().array() += post.config().sigma2;
  const Eigen::LLT<Eigen::MatrixXd> llt(
      a + post.applied_jitter() * Eigen::MatrixXd::Identity(a.rows(), a.cols()));
  const Eigen::VectorXd mean = lz.transpose() * post.alpha();
  Eigen::MatrixXd cov = meta - lz.transpose() * llt.solve(lz);
  cov = 0.5 * (cov + cov.transpose()).eval();
  const CholeskyResult chol =
      cholesky_ladder(cov, 1e-10, 1e-4, "empirical_norm_risk");
  const Eigen::MatrixXd lower = chol.llt.matrixL();

  Eigen::VectorXd truth_values(n);
  for (int i = 0; i < n; ++i)
    truth_values(i) = truth[static_cast<std::size_t>(i)].e_f0;

  rng::Rng gen(seed);
  Eigen::VectorXd z(n);
  double acc = 0.0;
  for (int r = 0; r < n_draws; ++r) {
    for (int i = 0; i < n; ++i) z(i) = gen.normal();
    acc += (mean + lower * z - truth_values).squaredNorm() /
           static_cast<double>(n);
  }
  return acc / static_cast<double>(n_draws);
}

double r_squared(const Eigen::VectorXd& pred, const Eigen::VectorXd& actual) {
  if (pred.size() != actual.size())
    throw config_error("r_squared: length mismatch");
  if (pred.size() < 2) throw config_error("r_squared needs >= 2 points");
  const double mean = actual.mean();
  const double sst = (actual.array() - mean).square().sum();
  if (sst == 0.0) throw config_error("r_squared: actual values are constant");
  const double sse = (actual - pred).squaredNorm();
  return 1.0 - sse / sst;
}

CvResult cross_validate(const Dataset& ds, const CvMethod& method, int k,
                        int reps, std::uint64_t seed) {
  ds.validate();
  if (reps < 1) throw config_error("cross_validate needs reps >= 1");
  CvResult result;
  result.per_rep.reserve(static_cast<std::size_t>(reps));

  for (int rep = 0; rep < reps; ++rep) {
    const auto folds = split_folds(
        ds, k, rng::derive(seed, {kStreamFolds, static_cast<std::uint64_t>(rep)}));
    double fold_acc = 0.0;
    for (const FoldSplit& fold : folds) {
      const Dataset train = ds.subset(fold.train);
      Eigen::VectorXd pred(static_cast<Eigen::Index>(fold.test.size()));
      Eigen::VectorXd actual(static_cast<Eigen::Index>(fold.test.size()));
      if (method.kind == CvMethod::Kind::exact) {
        const ExactPosterior post = fit_exact(train, method.spec, method.fit);
        for (std::size_t t = 0; t < fold.test.size(); ++t) {
          const Subject& subject =
              ds.subjects[static_cast<std::size_t>(fold.test[t])];
          pred(static_cast<Eigen::Index>(t)) =
              post.predict_outcome(subject.samples).mean;
          actual(static_cast<Eigen::Index>(t)) = subject.outcome;
        }
      } else {
        double sigma2 = method.fit.sigma2;
        if (method.gcv)
          sigma2 = gcv_score(train, method.spec, method.rank, method.gcv_grid,
                             method.fit.threads)
                       .best_sigma2;
        const LowRankFit fit = fit_lowrank(train, method.spec, method.rank,
                                           sigma2, method.fit.threads);
        for (std::size_t t = 0; t < fold.test.size(); ++t) {
          const Subject& subject =
              ds.subjects[static_cast<std::size_t>(fold.test[t])];
          pred(static_cast<Eigen::Index>(t)) =
              lowrank_predict(fit, train, method.spec, subject.samples);
          actual(static_cast<Eigen::Index>(t)) = subject.outcome;
        }
      }
      fold_acc += r_squared(pred, actual);
    }
    result.per_rep.push_back(fold_acc / static_cast<double>(k));
  }

  double mean = 0.0;
  for (double v : result.per_rep) mean += v;
  mean /= static_cast<double>(reps);
  const double half = normal_ci_half_width(result.per_rep);
  result.r2_mean = mean;
  result.ci_lo = mean - half;
  result.ci_hi = mean + half;
  return result;
}

ComparisonResult compare_methods(const ComparisonGrid& grid, std::uint64_t seed,
                                 int threads) {
  if (grid.n_values.empty() || grid.m_values.empty())
    throw config_error("compare_methods needs nonempty n and m lists");
  if (grid.reps < 1) throw config_error("compare_methods needs reps >= 1");

  struct Task {
    int n;
    int m;
    int rep;
    std::uint64_t data_seed;
    std::uint64_t risk_seed;
    double gpdr_risk = 0.0;
    double kde_risk = 0.0;
  };
  std::vector<Task> tasks;
  for (int n : grid.n_values)
    for (int m : grid.m_values)
      for (int rep = 0; rep < grid.reps; ++rep) {
        Task task;
        task.n = n;
        task.m = m;
        task.rep = rep;
        const auto un = static_cast<std::uint64_t>(n);
        const auto um = static_cast<std::uint64_t>(m);
        const auto ur = static_cast<std::uint64_t>(rep);
        task.data_seed = rng::derive(seed, {kStreamCellData, un, um, ur});
        task.risk_seed = rng::derive(seed, {kStreamCellRisk, un, um, ur});
        tasks.push_back(task);
      }

  // Replicates are independent; the Gram assembly inside each fit stays
  // single-threaded so the outer pool owns the parallelism.
  parallel_for(static_cast<int>(tasks.size()), threads, [&](int t) {
    Task& task = tasks[static_cast<std::size_t>(t)];
    const auto [ds, truth] =
        generate_dataset(grid.regime, task.n, task.m, grid.f0_name,
                         grid.sigma2, task.data_seed);
    FitConfig cfg;
    cfg.sigma2 = grid.sigma2;  // treated as known in simulation fits
    cfg.threads = 1;
    cfg.provider = GramProvider::empirical;
    const ExactPosterior gpdr_fit = fit_exact(ds, grid.spec, cfg);
    task.gpdr_risk = l2_risk(gpdr_fit, grid.f0_name, task.risk_seed,
                             grid.risk_grid_size, grid.risk_draws);
    if (grid.run_kde) {
      cfg.provider = GramProvider::kde;
      cfg.bandwidth = grid.kde_bandwidth.value_or(
          BandwidthRule::fixed(std::sqrt(grid.spec.lengthscale)));
      const ExactPosterior kde_fit = fit_exact(ds, grid.spec, cfg);
      task.kde_risk = l2_risk(kde_fit, grid.f0_name, task.risk_seed,
                              grid.risk_grid_size, grid.risk_draws);
    }
  });

  ComparisonResult result;
  const std::string regime_label = grid.regime.label();
  for (int n : grid.n_values)
    for (int m : grid.m_values) {
      RiskReport gpdr_cell;
      gpdr_cell.method = "gpdr";
      gpdr_cell.n = n;
      gpdr_cell.m = m;
      gpdr_cell.regime = regime_label;
      RiskReport kde_cell = gpdr_cell;
      kde_cell.method = "kde";
      std::vector<double> ratios;
      for (const Task& task : tasks) {
        if (task.n != n || task.m != m) continue;
        gpdr_cell.seeds.push_back(task.data_seed);
        gpdr_cell.risk_seeds.push_back(task.risk_seed);
        gpdr_cell.risks.push_back(task.gpdr_risk);
        if (grid.run_kde) {
          kde_cell.seeds.push_back(task.data_seed);
          kde_cell.risk_seeds.push_back(task.risk_seed);
          kde_cell.risks.push_back(task.kde_risk);
          ratios.push_back(task.gpdr_risk / task.kde_risk);
        }
      }
      auto finalize = [](RiskReport& cell) {
        double mean = 0.0;
        for (double r : cell.risks) mean += r;
        cell.mean_risk = mean / static_cast<double>(cell.risks.size());
        cell.ci_half_width = normal_ci_half_width(cell.risks);
      };
      finalize(gpdr_cell);
      result.cells.push_back(std::move(gpdr_cell));
      if (grid.run_kde) {
        finalize(kde_cell);
        result.cells.push_back(std::move(kde_cell));
        RatioRow row;
        row.n = n;
        row.m = m;
        row.regime = regime_label;
        double mean = 0.0;
        for (double r : ratios) mean += r;
        row.ratio_mean = mean / static_cast<double>(ratios.size());
        const double half = normal_ci_half_width(ratios);
        row.ci_lo = row.ratio_mean - half;
        row.ci_hi = row.ratio_mean + half;
        result.ratios.push_back(row);
      }
    }
  return result;
}

}  // namespace gpdr
