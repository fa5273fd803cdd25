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

#ifndef GPDR_LINALG_HPP
#define GPDR_LINALG_HPP

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <string>

namespace gpdr {

struct CholeskyResult {
  Eigen::LLT<Eigen::MatrixXd> llt;
  double jitter = 0.0;  // diagonal inflation that made the factorization work
};

/// Cholesky of `matrix` + jitter*I with an escalation ladder: starts at
/// start_jitter and multiplies by 10 (from at least 1e-8) up to max_jitter.
/// Escalations warn on stderr; exhausting the ladder throws numeric_error
/// reporting the smallest eigenvalue bound of the failing matrix.
CholeskyResult cholesky_ladder(const Eigen::MatrixXd& matrix,
                               double start_jitter, double max_jitter,
                               const std::string& context);

}  // namespace gpdr

#endif  // GPDR_LINALG_HPP
