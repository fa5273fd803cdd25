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

#ifndef GPDR_LOWRANK_HPP
#define GPDR_LOWRANK_HPP

#include <utility>
#include <vector>

#include "gpdr/data.hpp"
#include "gpdr/embed.hpp"
#include "gpdr/kernel.hpp"

namespace gpdr {

/// Point-estimate solver in the truncated eigenbasis of the averaged Gram:
/// ridge problem min |y - U D w_k|^2 / sigma2 + w_k' D w_k, solved
/// coordinatewise as w_k = (U'y) / (d + sigma2).
struct LowRankFit {
  int rank = 0;          // effective rank after the eigenvalue clip
  Eigen::MatrixXd u;     // n x rank, orthonormal columns
  Eigen::VectorXd d;     // rank eigenvalues, descending, all > clip
  Eigen::VectorXd wk;    // reduced-coordinate solution
  Eigen::VectorXd w;     // representer weights U wk
  double sigma2 = 0.0;
};

/// Top-k eigenpairs of the symmetric averaged Gram, descending. Eigenvalues
/// at or below the 1e-12 clip are dropped (shrinking k with a warning).
std::pair<Eigen::MatrixXd, Eigen::VectorXd> truncated_eig(
    const AveragedGram& gram, int k);

LowRankFit fit_lowrank(const Dataset& ds, const KernelSpec& spec, int k,
                       double sigma2, int threads = 0);

/// Fitted function on the grid: f(s) = sum_i w_i l_i(s).
Eigen::VectorXd lowrank_function(const LowRankFit& fit, const Dataset& ds,
                                 const KernelSpec& spec,
                                 const Eigen::MatrixXd& grid, int threads = 0);

/// Predicted outcomes for new subjects: the averaged fitted function,
/// l_new' w with l_new the between-subject averaged kernel vector.
double lowrank_predict(const LowRankFit& fit, const Dataset& ds,
                       const KernelSpec& spec,
                       const Eigen::MatrixXd& new_samples);

struct GcvResult {
  std::vector<std::pair<double, double>> table;  // (sigma2, score)
  double best_sigma2 = 0.0;
};

/// Generalized cross-validation over a sigma2 grid:
/// GCV = n |y - A y|^2 / (n - tr A)^2 with the diagonalized hat matrix
/// A = U diag(d / (d + sigma2)) U'. O(k) per grid point after projection.
GcvResult gcv_score(const Dataset& ds, const KernelSpec& spec, int k,
                    const std::vector<double>& sigma2_grid, int threads = 0);

/// Default CLI grid: 13 log-spaced points on [1e-4, 1e2].
std::vector<double> default_gcv_grid();

}  // namespace gpdr

#endif  // GPDR_LOWRANK_HPP
