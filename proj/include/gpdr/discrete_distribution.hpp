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

#ifndef GPDR_DISCRETE_DISTRIBUTION_HPP
#define GPDR_DISCRETE_DISTRIBUTION_HPP

#include <Eigen/Core>
#include <functional>

namespace gpdr {

/// Finite atomic distribution on the real line: matched atom/weight vectors
/// with nonnegative weights summing to one. Expectations against it are exact
/// finite sums, which is what makes simulated ground truth exact.
struct DiscreteDistribution {
  Eigen::VectorXd atoms;
  Eigen::VectorXd weights;

  /// Throws config_error on length mismatch, negative weights, or a weight
  /// sum off 1 by more than 1e-9.
  void validate() const;

  /// Exact expectation sum_k w_k f(atom_k).
  double expectation(const std::function<double(double)>& f) const;
};

}  // namespace gpdr

#endif  // GPDR_DISCRETE_DISTRIBUTION_HPP
