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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <set>

#include "gpdr/data.hpp"
#include "gpdr/errors.hpp"
#include "support/test_helpers.hpp"

using gpdr::Dataset;
using gpdr::load_dataset;
using gpdr::split_folds;
using gpdr::write_dataset;
using gpdr::testing::TempDir;

namespace {

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

}  // namespace

TEST_CASE("load_dataset structural case") {
  TempDir dir("load");
  write_file(dir.file("samples.csv"),
             "subject_id,dim_1\n"
             "a,0.1\na,0.2\na,0.3\n"
             "b,0.5\nb,0.6\nb,0.7\n");
  write_file(dir.file("outcomes.csv"), "subject_id,y\na,1.5\nb,-0.25\n");
  const Dataset ds = load_dataset(dir.file("samples.csv"), dir.file("outcomes.csv"));
  CHECK(ds.size() == 2);
  CHECK(ds.dim == 1);
  CHECK(ds.subjects[0].id == "a");
  CHECK(ds.subjects[0].samples.rows() == 3);
  CHECK(ds.subjects[0].samples(1, 0) == 0.2);
  CHECK(ds.subjects[1].outcome == -0.25);
}

TEST_CASE("load_dataset subject order follows outcomes file") {
  TempDir dir("order");
  write_file(dir.file("samples.csv"),
             "subject_id,dim_1\nb,0.5\na,0.1\na,0.2\n");
  write_file(dir.file("outcomes.csv"), "subject_id,y\nb,2\na,1\n");
  const Dataset ds = load_dataset(dir.file("samples.csv"), dir.file("outcomes.csv"));
  CHECK(ds.subjects[0].id == "b");
  CHECK(ds.subjects[1].id == "a");
}

TEST_CASE("load_dataset error contracts") {
  TempDir dir("errors");
  write_file(dir.file("samples.csv"), "subject_id,dim_1\na,0.1\n");

  write_file(dir.file("outcomes.csv"), "subject_id,y\na,1\ns7,1.5\n");
  CHECK_THROWS_WITH_AS(
      load_dataset(dir.file("samples.csv"), dir.file("outcomes.csv")),
      "subject s7 has no samples", gpdr::config_error);

  write_file(dir.file("outcomes.csv"), "subject_id,y\na,1\na,2\n");
  CHECK_THROWS_AS(load_dataset(dir.file("samples.csv"), dir.file("outcomes.csv")),
                  gpdr::config_error);

  write_file(dir.file("bad_samples.csv"), "subject_id,dim_1\na,0.1\na,oops\n");
  write_file(dir.file("outcomes.csv"), "subject_id,y\na,1\n");
  try {
    load_dataset(dir.file("bad_samples.csv"), dir.file("outcomes.csv"));
    FAIL("expected config_error");
  } catch (const gpdr::config_error& e) {
    CHECK(std::string(e.what()).find("row 3") != std::string::npos);
  }
}

TEST_CASE("dataset write/load round trip is value-identical") {
  const Dataset ds = gpdr::testing::random_dataset(6, 4, 123, 2.5);
  TempDir dir("roundtrip");
  write_dataset(ds, dir.file("samples.csv"), dir.file("outcomes.csv"));
  const Dataset loaded =
      load_dataset(dir.file("samples.csv"), dir.file("outcomes.csv"));
  REQUIRE(loaded.size() == ds.size());
  for (int i = 0; i < ds.size(); ++i) {
    CHECK(loaded.subjects[i].id == ds.subjects[i].id);
    CHECK(loaded.subjects[i].outcome == ds.subjects[i].outcome);
    CHECK(loaded.subjects[i].samples == ds.subjects[i].samples);
  }
}

TEST_CASE("split_folds block sizes and determinism") {
  const auto folds = split_folds(10, 5, 42);
  REQUIRE(folds.size() == 5);
  std::set<int> all;
  for (const auto& fold : folds) {
    CHECK(fold.test.size() == 2);
    CHECK(fold.train.size() == 8);
    all.insert(fold.test.begin(), fold.test.end());
  }
  CHECK(all.size() == 10);

  const auto again = split_folds(10, 5, 42);
  for (std::size_t f = 0; f < folds.size(); ++f) {
    CHECK(folds[f].test == again[f].test);
    CHECK(folds[f].train == again[f].train);
  }

  const auto uneven = split_folds(7, 3, 1);
  CHECK(uneven[0].test.size() == 3);
  CHECK(uneven[1].test.size() == 2);
  CHECK(uneven[2].test.size() == 2);

  CHECK_THROWS_AS(split_folds(3, 4, 0), gpdr::config_error);
}

TEST_CASE("split_folds partition property over many shapes") {
  for (int n = 2; n <= 50; n += 3)
    for (int k = 2; k <= n; k += 5) {
      const auto folds = split_folds(n, k, static_cast<std::uint64_t>(n * 97 + k));
      std::set<int> seen;
      std::size_t total = 0;
      for (const auto& fold : folds) {
        total += fold.test.size();
        for (int idx : fold.test) {
          CHECK(seen.insert(idx).second);  // disjoint
          CHECK(idx >= 0);
          CHECK(idx < n);
        }
        // train/test partition the index set
        std::set<int> uni(fold.train.begin(), fold.train.end());
        for (int idx : fold.test) uni.insert(idx);
        CHECK(uni.size() == static_cast<std::size_t>(n));
      }
      CHECK(total == static_cast<std::size_t>(n));  // exhaustive
    }
}
