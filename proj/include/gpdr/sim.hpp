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

#ifndef GPDR_SIM_HPP
#define GPDR_SIM_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gpdr/data.hpp"
#include "gpdr/discrete_distribution.hpp"

namespace gpdr {

/// Named true regression functions. Registered: "bump10" (10 x exp(-5x))
/// and "sine" (sin(2 pi x)). Unknown names raise config_error listing the
/// registry.
std::function<double(double)> f0_lookup(const std::string& name);
std::vector<std::string> f0_names();

/// Truncated stick-breaking draw from DP(Unif[0,1], alpha). Sticks are broken
/// until the leftover mass drops below truncation_eps or max_atoms is hit;
/// the last atom absorbs the leftover so weights sum to exactly 1.
DiscreteDistribution sample_dp(double alpha, std::uint64_t seed,
                               double truncation_eps = 1e-10,
                               int max_atoms = 10000);

/// m i.i.d. categorical draws via inverse CDF on cumulative weights.
Eigen::VectorXd sample_from_discrete(const DiscreteDistribution& z, int m,
                                     std::uint64_t seed);

struct LogitNormalDraw {
  Eigen::VectorXd samples;  // in (0, 1)
  double c = 0.0;           // subject-level location, N(0, 4)
  double e_f0 = 0.0;        // E_Z f0 by 64-node Gauss-Hermite quadrature
};

/// Logit-normal subject: c ~ N(0,4); latent AR(1) chain with stationary
/// marginal N(c, 0.09) and lag-1 coefficient rho; samples are the logistic
/// image of the chain. rho outside [0, 1) raises config_error.
LogitNormalDraw sample_logitnormal_subject(
    int m, double rho, const std::function<double(double)>& f0,
    std::uint64_t seed);

struct Regime {
  enum class Kind { dp, logitnormal };
  Kind kind = Kind::dp;
  double alpha = 25.0;  // DP concentration
  double rho = 0.0;     // AR(1) coefficient on the logit scale

  static Regime dp(double alpha) { return {Kind::dp, alpha, 0.0}; }
  static Regime logitnormal(double rho) { return {Kind::logitnormal, 25.0, rho}; }
  std::string label() const;
};

/// Ground truth retained per simulated subject: the covariate distribution
/// (atoms for DP, the location c for logit-normal), the exact E_Z f0, and
/// the noiseless outcome.
struct TruthRecord {
  std::string subject_id;
  std::optional<DiscreteDistribution> distribution;
  std::optional<double> c;
  double e_f0 = 0.0;
  double y_noiseless = 0.0;
  std::string f0_name;
};

/// Draws n subjects with m repeated measures each and outcomes
/// y_i = E_{Z_i} f0 + sqrt(sigma2) * eps. Each subject consumes its own
/// derived substream, so changing n or m leaves earlier subjects intact.
std::pair<Dataset, std::vector<TruthRecord>> generate_dataset(
    const Regime& regime, int n, int m, const std::string& f0_name,
    double sigma2, std::uint64_t seed);

}  // namespace gpdr

#endif  // GPDR_SIM_HPP
