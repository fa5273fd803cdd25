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

#include "gpdr/lowrank.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <iostream>

#include "gpdr/errors.hpp"

namespace gpdr {

namespace {

constexpr double kEigClip = 1e-12;

}  // namespace

std::pair<Eigen::MatrixXd, Eigen::VectorXd> truncated_eig(
    const AveragedGram& gram, int k) {
  const Eigen::Index n = gram.m.rows();
  if (k < 1) throw config_error("truncated_eig needs k >= 1");
  if (k > n) throw config_error("truncated_eig needs k <= n");

  // Dense decomposition; n stays small at desk scale. The interface leaves
  // room for an iterative backend later.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram.m);
  if (solver.info() != Eigen::Success)
    throw numeric_error("truncated_eig: eigendecomposition failed");

  // Eigen returns ascending order; keep the top k above the clip.
  int kept = 0;
  for (int i = 0; i < k; ++i) {
    if (solver.eigenvalues()(n - 1 - i) > kEigClip)
      ++kept;
    else
      break;
  }
  if (kept < k)
    std::cerr << "warning: truncated_eig: " << (k - kept)
              << " eigenvalue(s) at or below clip " << kEigClip
              << " dropped; effective rank " << kept << "\n";
  if (kept == 0)
    throw numeric_error("truncated_eig: no eigenvalues above the clip");

  Eigen::MatrixXd u(n, kept);
  Eigen::VectorXd d(kept);
  for (int i = 0; i < kept; ++i) {
    u.col(i) = solver.eigenvectors().col(n - 1 - i);
    d(i) = solver.eigenvalues()(n - 1 - i);
  }
  return {std::move(u), std::move(d)};
}

LowRankFit fit_lowrank(const Dataset& ds, const KernelSpec& spec, int k,
                       double sigma2, int threads) {
  if (!(sigma2 > 0.0)) throw config_error("fit_lowrank needs sigma2 > 0");
  const AveragedGram gram = average_gram(spec, ds, threads);
  auto [u, d] = truncated_eig(gram, k);

  LowRankFit fit;
  fit.rank = static_cast<int>(d.size());
  fit.sigma2 = sigma2;
  const Eigen::VectorXd projected = u.transpose() * ds.outcomes();
  fit.wk = (projected.array() / (d.array() + sigma2)).matrix();
  fit.w = u * fit.wk;
  fit.u = std::move(u);
  fit.d = std::move(d);
  return fit;
}

Eigen::VectorXd lowrank_function(const LowRankFit& fit, const Dataset& ds,
                                 const KernelSpec& spec,
                                 const Eigen::MatrixXd& grid, int threads) {
  if (fit.w.size() != ds.size())
    throw config_error("lowrank_function: fit/dataset size mismatch");
  if (grid.rows() == 0) return Eigen::VectorXd(0);
  return cross_matrix(spec, ds, grid, threads).transpose() * fit.w;
}

double lowrank_predict(const LowRankFit& fit, const Dataset& ds,
                       const KernelSpec& spec,
                       const Eigen::MatrixXd& new_samples) {
  if (fit.w.size() != ds.size())
    throw config_error("lowrank_predict: fit/dataset size mismatch");
  return subject_cross_vector(spec, ds, new_samples).dot(fit.w);
}

GcvResult gcv_score(const Dataset& ds, const KernelSpec& spec, int k,
                    const std::vector<double>& sigma2_grid, int threads) {
  if (sigma2_grid.empty()) throw config_error("gcv_score: empty sigma2 grid");
  const AveragedGram gram = average_gram(spec, ds, threads);
  const auto [u, d] = truncated_eig(gram, k);
  const Eigen::VectorXd y = ds.outcomes();
  const Eigen::VectorXd projected = u.transpose() * y;
  const double y_sq = y.squaredNorm();
  const auto n = static_cast<double>(ds.size());

  GcvResult result;
  double best = std::numeric_limits<double>::infinity();
  for (double sigma2 : sigma2_grid) {
    if (!(sigma2 > 0.0)) throw config_error("gcv_score: sigma2 must be > 0");
    const Eigen::ArrayXd shrink = d.array() / (d.array() + sigma2);
    const double trace = shrink.sum();
    const double rss =
        y_sq - ((2.0 * shrink - shrink.square()) * projected.array().square()).sum();
    const double denom = n - trace;
    const double score = n * rss / (denom * denom);
    result.table.emplace_back(sigma2, score);
    if (score < best) {
      best = score;
      result.best_sigma2 = sigma2;
    }
  }
  return result;
}

std::vector<double> default_gcv_grid() {
  std::vector<double> grid;
  for (int i = 0; i < 13; ++i)
    grid.push_back(std::pow(10.0, -4.0 + 0.5 * static_cast<double>(i)));
  return grid;
}

}  // namespace gpdr
