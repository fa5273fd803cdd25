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

#ifndef GPDR_TESTS_SUPPORT_TEST_HELPERS_HPP
#define GPDR_TESTS_SUPPORT_TEST_HELPERS_HPP

#include <Eigen/Core>
#include <filesystem>
#include <random>
#include <string>

#include "gpdr/data.hpp"

namespace gpdr::testing {

/// Random 1-D dataset with m samples per subject on roughly [0, 1] and
/// standard-normal-ish outcomes. Independent of the library RNG on purpose.
inline Dataset random_dataset(int n, int m, unsigned seed,
                              double outcome_scale = 1.0) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> norm(0.0, 1.0);
  Dataset ds;
  ds.dim = 1;
  for (int i = 0; i < n; ++i) {
    Subject s;
    s.id = "s" + std::to_string(i + 1);
    s.samples.resize(m, 1);
    for (int j = 0; j < m; ++j) s.samples(j, 0) = unif(gen);
    s.outcome = outcome_scale * norm(gen);
    ds.subjects.push_back(std::move(s));
  }
  return ds;
}

/// Unique scratch directory under the system temp root, removed on
/// destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("gpdr_test_" + tag + "_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter.fetch_add(1)));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }
  std::string file(const std::string& name) const {
    return (path_ / name).string();
  }

 private:
  std::filesystem::path path_;
};

}  // namespace gpdr::testing

#endif  // GPDR_TESTS_SUPPORT_TEST_HELPERS_HPP
