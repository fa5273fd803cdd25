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

#ifndef GPDR_DATA_HPP
#define GPDR_DATA_HPP

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

namespace gpdr {

/// One regression unit: repeated covariate measures plus a scalar outcome.
/// samples is m_i x d with one measure per row; m_i >= 1.
struct Subject {
  std::string id;
  Eigen::MatrixXd samples;
  double outcome = 0.0;
};

struct Dataset {
  std::vector<Subject> subjects;
  int dim = 1;

  int size() const { return static_cast<int>(subjects.size()); }
  Eigen::VectorXd outcomes() const;
  /// Throws config_error on empty subjects, duplicate ids, empty sample
  /// sets, or dimension mismatches.
  void validate() const;
  /// Dataset restricted to the given subject indices, order preserved.
  Dataset subset(const std::vector<int>& indices) const;
};

/// Reads the long-format samples CSV (`subject_id,dim_1,...,dim_d`) and the
/// outcomes CSV (`subject_id,y`). Subjects are ordered by outcome-file order;
/// each subject's samples keep their file order. Errors (config_error) name
/// the offending subject or row: outcome subjects without samples, duplicate
/// outcome ids, non-numeric cells, ragged rows.
Dataset load_dataset(const std::string& samples_path,
                     const std::string& outcomes_path);

/// Writes the same two-file schema (UTF-8, comma-separated, '.' decimal
/// point) with full round-trip precision.
void write_dataset(const Dataset& ds, const std::string& samples_path,
                   const std::string& outcomes_path);

struct FoldSplit {
  std::vector<int> train;
  std::vector<int> test;
};

/// Seeded uniform permutation of 0..n-1 cut into k contiguous test blocks of
/// size floor(n/k) or ceil(n/k) (the first n mod k blocks take the larger
/// size). Deterministic given seed. Throws config_error unless 2 <= k <= n.
std::vector<FoldSplit> split_folds(int n, int k, std::uint64_t seed);
std::vector<FoldSplit> split_folds(const Dataset& ds, int k, std::uint64_t seed);

}  // namespace gpdr

#endif  // GPDR_DATA_HPP
