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

#include "gpdr/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <iostream>

#include "gpdr/errors.hpp"

namespace gpdr {

CholeskyResult cholesky_ladder(const Eigen::MatrixXd& matrix,
                               double start_jitter, double max_jitter,
                               const std::string& context) {
  if (matrix.rows() != matrix.cols())
    throw numeric_error(context + ": matrix must be square");
  const Eigen::Index n = matrix.rows();
  double jitter = start_jitter;
  for (;;) {
    CholeskyResult result;
    if (jitter == 0.0)
      result.llt.compute(matrix);
    else
      result.llt.compute(matrix +
                         jitter * Eigen::MatrixXd::Identity(n, n));
    if (result.llt.info() == Eigen::Success) {
      result.jitter = jitter;
      if (jitter > start_jitter)
        std::cerr << "warning: " << context << ": Cholesky needed jitter "
                  << jitter << " (configured " << start_jitter << ")\n";
      return result;
    }
    if (jitter >= max_jitter) break;
    jitter = std::min(max_jitter, std::max(jitter * 10.0, 1e-8));
  }
  const double eig_min =
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(matrix)
          .eigenvalues()
          .minCoeff();
  throw numeric_error(context + ": Cholesky failed up to jitter " +
                      std::to_string(max_jitter) +
                      "; smallest eigenvalue bound " + std::to_string(eig_min));
}

}  // namespace gpdr
