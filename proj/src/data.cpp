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

#include "gpdr/data.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "gpdr/errors.hpp"
#include "gpdr/rng.hpp"

namespace gpdr {

Eigen::VectorXd Dataset::outcomes() const {
  Eigen::VectorXd y(size());
  for (int i = 0; i < size(); ++i) y(i) = subjects[static_cast<std::size_t>(i)].outcome;
  return y;
}

void Dataset::validate() const {
  if (subjects.empty()) throw config_error("dataset has no subjects");
  if (dim < 1) throw config_error("dataset dim must be >= 1");
  std::unordered_set<std::string> seen;
  for (const Subject& s : subjects) {
    if (!seen.insert(s.id).second)
      throw config_error("duplicate subject id '" + s.id + "'");
    if (s.samples.rows() < 1)
      throw config_error("subject " + s.id + " has no samples");
    if (s.samples.cols() != dim)
      throw config_error("subject " + s.id + " has sample dimension " +
                         std::to_string(s.samples.cols()) + ", expected " +
                         std::to_string(dim));
  }
}

Dataset Dataset::subset(const std::vector<int>& indices) const {
  Dataset out;
  out.dim = dim;
  out.subjects.reserve(indices.size());
  for (int i : indices) {
    if (i < 0 || i >= size())
      throw config_error("subset index out of range: " + std::to_string(i));
    out.subjects.push_back(subjects[static_cast<std::size_t>(i)]);
  }
  return out;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double parse_cell(const std::string& cell, const std::string& file, int row) {
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(cell, &used);
  } catch (const std::exception&) {
    throw config_error(file + " row " + std::to_string(row) +
                       ": non-numeric cell '" + cell + "'");
  }
  while (used < cell.size() &&
         (cell[used] == ' ' || cell[used] == '\r' || cell[used] == '\t'))
    ++used;
  if (used != cell.size())
    throw config_error(file + " row " + std::to_string(row) +
                       ": non-numeric cell '" + cell + "'");
  return value;
}

std::string strip_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

}  // namespace

Dataset load_dataset(const std::string& samples_path,
                     const std::string& outcomes_path) {
  std::ifstream samples_in(samples_path);
  if (!samples_in) throw config_error("cannot open " + samples_path);
  std::ifstream outcomes_in(outcomes_path);
  if (!outcomes_in) throw config_error("cannot open " + outcomes_path);

  std::string line;
  if (!std::getline(samples_in, line))
    throw config_error(samples_path + " is empty");
  const auto header = split_csv_line(strip_cr(line));
  if (header.size() < 2 || header[0] != "subject_id")
    throw config_error(samples_path +
                       ": expected header subject_id,dim_1,...,dim_d");
  const int dim = static_cast<int>(header.size()) - 1;

  std::unordered_map<std::string, std::vector<std::vector<double>>> samples;
  int row = 1;
  while (std::getline(samples_in, line)) {
    ++row;
    line = strip_cr(line);
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (static_cast<int>(cells.size()) != dim + 1)
      throw config_error(samples_path + " row " + std::to_string(row) +
                         ": expected " + std::to_string(dim + 1) + " cells");
    std::vector<double> point(static_cast<std::size_t>(dim));
    for (int d = 0; d < dim; ++d)
      point[static_cast<std::size_t>(d)] =
          parse_cell(cells[static_cast<std::size_t>(d + 1)], samples_path, row);
    samples[cells[0]].push_back(std::move(point));
  }

  Dataset ds;
  ds.dim = dim;
  if (!std::getline(outcomes_in, line))
    throw config_error(outcomes_path + " is empty");
  if (split_csv_line(strip_cr(line)) != std::vector<std::string>{"subject_id", "y"})
    throw config_error(outcomes_path + ": expected header subject_id,y");
  std::unordered_set<std::string> seen;
  row = 1;
  while (std::getline(outcomes_in, line)) {
    ++row;
    line = strip_cr(line);
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != 2)
      throw config_error(outcomes_path + " row " + std::to_string(row) +
                         ": expected 2 cells");
    const std::string& id = cells[0];
    if (!seen.insert(id).second)
      throw config_error(outcomes_path + ": duplicate outcome id '" + id + "'");
    const auto found = samples.find(id);
    if (found == samples.end() || found->second.empty())
      throw config_error("subject " + id + " has no samples");
    Subject subject;
    subject.id = id;
    subject.outcome = parse_cell(cells[1], outcomes_path, row);
    const auto& rows = found->second;
    subject.samples.resize(static_cast<Eigen::Index>(rows.size()), dim);
    for (std::size_t r = 0; r < rows.size(); ++r)
      for (int d = 0; d < dim; ++d)
        subject.samples(static_cast<Eigen::Index>(r), d) =
            rows[r][static_cast<std::size_t>(d)];
    ds.subjects.push_back(std::move(subject));
  }
  ds.validate();
  return ds;
}

namespace {

std::string format_full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void write_dataset(const Dataset& ds, const std::string& samples_path,
                   const std::string& outcomes_path) {
  ds.validate();
  std::ofstream samples_out(samples_path);
  if (!samples_out) throw config_error("cannot write " + samples_path);
  samples_out << "subject_id";
  for (int d = 1; d <= ds.dim; ++d) samples_out << ",dim_" << d;
  samples_out << "\n";
  for (const Subject& s : ds.subjects)
    for (Eigen::Index r = 0; r < s.samples.rows(); ++r) {
      samples_out << s.id;
      for (int d = 0; d < ds.dim; ++d)
        samples_out << ',' << format_full(s.samples(r, d));
      samples_out << "\n";
    }

  std::ofstream outcomes_out(outcomes_path);
  if (!outcomes_out) throw config_error("cannot write " + outcomes_path);
  outcomes_out << "subject_id,y\n";
  for (const Subject& s : ds.subjects)
    outcomes_out << s.id << ',' << format_full(s.outcome) << "\n";
}

std::vector<FoldSplit> split_folds(int n, int k, std::uint64_t seed) {
  if (k < 2) throw config_error("split_folds needs k >= 2");
  if (k > n)
    throw config_error("split_folds needs k <= n (k=" + std::to_string(k) +
                       ", n=" + std::to_string(n) + ")");
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  rng::Rng gen(rng::derive(seed, {0x666f6c64ULL}));
  for (int i = n - 1; i > 0; --i)
    std::swap(order[static_cast<std::size_t>(i)],
              order[gen.below(static_cast<std::uint64_t>(i) + 1)]);

  std::vector<FoldSplit> folds(static_cast<std::size_t>(k));
  const int base = n / k;
  const int extra = n % k;
  int offset = 0;
  for (int f = 0; f < k; ++f) {
    const int size = base + (f < extra ? 1 : 0);
    auto& fold = folds[static_cast<std::size_t>(f)];
    fold.test.assign(order.begin() + offset, order.begin() + offset + size);
    fold.train.reserve(static_cast<std::size_t>(n - size));
    for (int i = 0; i < n; ++i) {
      const int idx = order[static_cast<std::size_t>(i)];
      if (i < offset || i >= offset + size) fold.train.push_back(idx);
    }
    offset += size;
  }
  return folds;
}

std::vector<FoldSplit> split_folds(const Dataset& ds, int k, std::uint64_t seed) {
  return split_folds(ds.size(), k, seed);
}

}  // namespace gpdr
