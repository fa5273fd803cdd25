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

#ifndef GPDR_EVAL_HPP
#define GPDR_EVAL_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gpdr/exact.hpp"
#include "gpdr/lowrank.hpp"
#include "gpdr/sim.hpp"

namespace gpdr {

/// Mean over posterior function draws of the trapezoid L2 error against the
/// named truth on a uniform [0,1] grid. 1-D fits only.
double l2_risk(const ExactPosterior& post, const std::string& f0_name,
               std::uint64_t seed, int grid_size = 201, int n_draws = 100);

/// Mean over posterior draws of (1/n) sum_i (E_{Z_i} fhat - E_{Z_i} f0)^2,
/// exact per atom set. Truth records must carry DP atoms.
double empirical_norm_risk(const ExactPosterior& post,
                           const std::vector<TruthRecord>& truth, int n_draws,
                           std::uint64_t seed);

/// 1 - SSE/SST about the mean of `actual`. Constant `actual` is an error.
double r_squared(const Eigen::VectorXd& pred, const Eigen::VectorXd& actual);

struct CvMethod {
  enum class Kind { exact, lowrank };
  Kind kind = Kind::exact;
  KernelSpec spec;
  FitConfig fit;          // provider/sigma2 for the exact path
  int rank = 10;          // lowrank only
  bool gcv = false;       // lowrank: pick sigma2 by GCV on each train fold
  std::vector<double> gcv_grid = default_gcv_grid();
};

struct CvResult {
  double r2_mean = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  std::vector<double> per_rep;  // per-replicate fold-averaged R^2
};

/// K-fold cross-validation repeated `reps` times with derived fold seeds.
/// Per rep: fit on each train fold, predict held-out outcomes, average the
/// per-fold R^2. CI is the normal approximation over replicates.
CvResult cross_validate(const Dataset& ds, const CvMethod& method, int k,
                        int reps, std::uint64_t seed);

/// One (n, m, method) cell of the simulation comparison.
struct RiskReport {
  std::string method;
  int n = 0;
  int m = 0;
  std::string regime;
  std::vector<std::uint64_t> seeds;       // per-replicate data seeds
  std::vector<std::uint64_t> risk_seeds;  // per-replicate risk-draw seeds
  std::vector<double> risks;
  double mean_risk = 0.0;
  double ci_half_width = 0.0;
};

struct RatioRow {
  int n = 0;
  int m = 0;
  std::string regime;
  double ratio_mean = 0.0;  // per-replicate GPDR/KDE risks, averaged
  double ci_lo = 0.0;
  double ci_hi = 0.0;
};

struct ComparisonGrid {
  std::vector<int> n_values;
  std::vector<int> m_values;
  Regime regime = Regime::dp(25.0);
  int reps = 20;
  std::string f0_name = "bump10";
  double sigma2 = 0.01;  // generation noise; fits treat it as known
  KernelSpec spec;
  int risk_grid_size = 201;
  int risk_draws = 100;
  bool run_kde = true;
  /// Bandwidth for the KDE comparator. Defaults (nullopt) to the fixed
  /// kernel-scale rule h = sqrt(lengthscale): an m-independent smoothing,
  /// which is what keeps the KDE risk gap from closing as m grows.
  std::optional<BandwidthRule> kde_bandwidth;
};

struct ComparisonResult {
  std::vector<RiskReport> cells;  // sorted by (n, m, method)
  std::vector<RatioRow> ratios;   // empty when run_kde is false
};

/// Generate -> fit -> l2_risk over the full (n, m, replicate) lattice for
/// GPDR and (optionally) the KDE provider. Replicates share the dataset
/// across methods and run in parallel on derived substreams; output order
/// is fixed regardless of thread count.
ComparisonResult compare_methods(const ComparisonGrid& grid, std::uint64_t seed,
                                 int threads = 0);

}  // namespace gpdr

#endif  // GPDR_EVAL_HPP
