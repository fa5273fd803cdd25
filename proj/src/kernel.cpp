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

#include "gpdr/kernel.hpp"

#include <cmath>

#include "gpdr/errors.hpp"

namespace gpdr {

std::string to_string(KernelFamily family) {
  return family == KernelFamily::gaussian ? "gaussian" : "matern";
}

KernelFamily kernel_family_from_string(const std::string& name) {
  if (name == "gaussian") return KernelFamily::gaussian;
  if (name == "matern") return KernelFamily::matern;
  throw config_error("unknown kernel family '" + name +
                     "' (expected gaussian or matern)");
}

void KernelSpec::validate() const {
  if (!(lengthscale > 0.0))
    throw config_error("kernel lengthscale must be positive");
  if (dim < 1) throw config_error("kernel dim must be >= 1");
  if (family == KernelFamily::matern && smoothness != 0.5 &&
      smoothness != 1.5 && smoothness != 2.5)
    throw config_error(
        "matern smoothness must be one of 0.5, 1.5, 2.5 (closed forms)");
}

double kernel_value(const KernelSpec& spec, double r) {
  if (spec.family == KernelFamily::gaussian)
    return std::exp(-r * r / (2.0 * spec.lengthscale));
  const double z = r / spec.lengthscale;
  if (spec.smoothness == 0.5) return std::exp(-z);
  if (spec.smoothness == 1.5) {
    const double s = std::sqrt(3.0) * z;
    return (1.0 + s) * std::exp(-s);
  }
  const double s = std::sqrt(5.0) * z;
  return (1.0 + s + 5.0 * z * z / 3.0) * std::exp(-s);
}

namespace {

void check_dim(const KernelSpec& spec, const Eigen::VectorXd& p,
               const char* label) {
  if (p.size() != spec.dim)
    throw config_error(std::string("kernel point '") + label + "' has dimension " +
                       std::to_string(p.size()) + ", expected " +
                       std::to_string(spec.dim));
}

}  // namespace

double kernel_eval(const KernelSpec& spec, const Eigen::VectorXd& s,
                   const Eigen::VectorXd& t) {
  check_dim(spec, s, "s");
  check_dim(spec, t, "t");
  return kernel_value(spec, (s - t).norm());
}

Eigen::VectorXd kernel_row(const KernelSpec& spec, const Eigen::MatrixXd& points,
                           const Eigen::VectorXd& s) {
  if (points.cols() != spec.dim || s.size() != spec.dim)
    throw config_error("kernel_row: dimension mismatch against spec.dim");
  if (spec.family == KernelFamily::gaussian) {
    const double inv2l = 1.0 / (2.0 * spec.lengthscale);
    return (-(points.rowwise() - s.transpose()).rowwise().squaredNorm().array() *
            inv2l)
        .exp()
        .matrix();
  }
  Eigen::ArrayXd r =
      (points.rowwise() - s.transpose()).rowwise().norm().array() /
      spec.lengthscale;
  if (spec.smoothness == 0.5) return (-r).exp().matrix();
  if (spec.smoothness == 1.5) {
    Eigen::ArrayXd z = std::sqrt(3.0) * r;
    return ((1.0 + z) * (-z).exp()).matrix();
  }
  Eigen::ArrayXd z = std::sqrt(5.0) * r;
  return ((1.0 + z + 5.0 / 3.0 * r.square()) * (-z).exp()).matrix();
}

Eigen::MatrixXd gram(const KernelSpec& spec, const Eigen::MatrixXd& a,
                     const Eigen::MatrixXd& b) {
  if (a.rows() == 0 || b.rows() == 0)
    return Eigen::MatrixXd(a.rows(), b.rows());
  if (a.cols() != spec.dim || b.cols() != spec.dim)
    throw config_error("gram: point dimension mismatch against spec.dim");
  if (a.rows() == b.rows() && a == b) return gram(spec, a);
  Eigen::MatrixXd out(a.rows(), b.rows());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    out.row(i) = kernel_row(spec, b, a.row(i).transpose()).transpose();
  return out;
}

Eigen::MatrixXd gram(const KernelSpec& spec, const Eigen::MatrixXd& points) {
  if (points.rows() == 0) return Eigen::MatrixXd(0, 0);
  if (points.cols() != spec.dim)
    throw config_error("gram: point dimension mismatch against spec.dim");
  const Eigen::Index n = points.rows();
  Eigen::MatrixXd out(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::VectorXd xi = points.row(i).transpose();
    for (Eigen::Index j = 0; j <= i; ++j) {
      const double v = kernel_value(spec, (xi - points.row(j).transpose()).norm());
      out(i, j) = v;
      out(j, i) = v;
    }
  }
  return out;
}

}  // namespace gpdr
