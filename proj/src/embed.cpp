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

#include "gpdr/embed.hpp"

#include <cmath>
#include <iostream>
#include <vector>

#include "gpdr/errors.hpp"
#include "gpdr/numeric.hpp"
#include "gpdr/parallel.hpp"

namespace gpdr {

std::string to_string(GramProvider provider) {
  return provider == GramProvider::empirical ? "empirical" : "kde";
}

GramProvider gram_provider_from_string(const std::string& name) {
  if (name == "empirical") return GramProvider::empirical;
  if (name == "kde") return GramProvider::kde;
  throw config_error("unknown gram provider '" + name +
                     "' (expected empirical or kde)");
}

namespace {

// Averaged kernel over all sample pairs: u-major accumulation with a
// vectorized inner sweep, so the value is independent of how callers
// distribute entries across threads.
double pair_average(const KernelSpec& spec, const Eigen::MatrixXd& a,
                    const Eigen::MatrixXd& b) {
  double total = 0.0;
  if (spec.dim == 1) {
    const auto av = a.col(0).array();
    const auto bv = b.col(0).array();
    if (spec.family == KernelFamily::gaussian) {
      const double inv2l = 1.0 / (2.0 * spec.lengthscale);
      for (Eigen::Index u = 0; u < av.size(); ++u)
        total += (-(bv - av(u)).square() * inv2l).exp().sum();
    } else if (spec.smoothness == 0.5) {
      const double invl = 1.0 / spec.lengthscale;
      for (Eigen::Index u = 0; u < av.size(); ++u)
        total += (-(bv - av(u)).abs() * invl).exp().sum();
    } else if (spec.smoothness == 1.5) {
      const double c = std::sqrt(3.0) / spec.lengthscale;
      for (Eigen::Index u = 0; u < av.size(); ++u) {
        Eigen::ArrayXd z = (bv - av(u)).abs() * c;
        total += ((1.0 + z) * (-z).exp()).sum();
      }
    } else {
      const double c = std::sqrt(5.0) / spec.lengthscale;
      for (Eigen::Index u = 0; u < av.size(); ++u) {
        Eigen::ArrayXd z = (bv - av(u)).abs() * c;
        total += ((1.0 + z + z.square() / 3.0) * (-z).exp()).sum();
      }
    }
  } else {
    for (Eigen::Index u = 0; u < a.rows(); ++u)
      total += kernel_row(spec, b, a.row(u).transpose()).sum();
  }
  return total / (static_cast<double>(a.rows()) * static_cast<double>(b.rows()));
}

void check_dataset(const KernelSpec& spec, const Dataset& ds) {
  ds.validate();
  if (ds.dim != spec.dim)
    throw config_error("dataset dimension " + std::to_string(ds.dim) +
                       " does not match kernel dim " + std::to_string(spec.dim));
}

}  // namespace

double subject_kernel(const KernelSpec& spec, const Eigen::MatrixXd& a,
                      const Eigen::MatrixXd& b) {
  if (a.rows() == 0 || b.rows() == 0)
    throw config_error("subject_kernel needs nonempty sample sets");
  if (a.cols() != spec.dim || b.cols() != spec.dim)
    throw config_error("subject_kernel: sample dimension mismatch");
  return pair_average(spec, a, b);
}

AveragedGram average_gram(const KernelSpec& spec, const Dataset& ds,
                          int threads) {
  spec.validate();
  check_dataset(spec, ds);
  const int n = ds.size();
  AveragedGram out;
  out.provider = GramProvider::empirical;
  out.m.resize(n, n);
  parallel_for(n, threads, [&](int i) {
    const auto& xi = ds.subjects[static_cast<std::size_t>(i)].samples;
    for (int j = 0; j <= i; ++j) {
      out.m(i, j) =
          pair_average(spec, xi, ds.subjects[static_cast<std::size_t>(j)].samples);
    }
  });
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < i; ++j) out.m(j, i) = out.m(i, j);
  return out;
}

Eigen::VectorXd cross_vector(const KernelSpec& spec, const Dataset& ds,
                             const Eigen::VectorXd& s) {
  spec.validate();
  check_dataset(spec, ds);
  if (s.size() != spec.dim)
    throw config_error("cross_vector: point dimension mismatch");
  const int n = ds.size();
  Eigen::VectorXd out(n);
  for (int i = 0; i < n; ++i) {
    const auto& xi = ds.subjects[static_cast<std::size_t>(i)].samples;
    out(i) = kernel_row(spec, xi, s).sum() / static_cast<double>(xi.rows());
  }
  return out;
}

Eigen::MatrixXd cross_matrix(const KernelSpec& spec, const Dataset& ds,
                             const Eigen::MatrixXd& grid, int threads) {
  spec.validate();
  check_dataset(spec, ds);
  if (grid.cols() != spec.dim)
    throw config_error("cross_matrix: grid dimension mismatch");
  Eigen::MatrixXd out(ds.size(), grid.rows());
  parallel_for(static_cast<int>(grid.rows()), threads, [&](int g) {
    out.col(g) = cross_vector(spec, ds, grid.row(g).transpose());
  });
  return out;
}

Eigen::VectorXd subject_cross_vector(const KernelSpec& spec, const Dataset& ds,
                                     const Eigen::MatrixXd& new_samples) {
  spec.validate();
  check_dataset(spec, ds);
  Eigen::VectorXd out(ds.size());
  for (int i = 0; i < ds.size(); ++i)
    out(i) = subject_kernel(spec, new_samples,
                            ds.subjects[static_cast<std::size_t>(i)].samples);
  return out;
}

namespace {

// Silverman's rule with the bw.nrd0-style spread cascade: inter-quartile
// range, then the standard deviation, then the data magnitude. The last
// rung keeps zero-variance subjects (common under highly discrete
// covariate distributions) smoothed at the scale of their data instead of
// collapsing the KDE back to the empirical measure.
double silverman_bandwidth_impl(const Eigen::VectorXd& samples,
                                bool* degenerate) {
  const Eigen::Index m = samples.size();
  if (m < 1) throw config_error("silverman_bandwidth needs samples");
  const double sd = std::sqrt(numeric::sample_variance(samples));
  std::vector<double> values(samples.data(), samples.data() + m);
  const double iqr =
      numeric::quantile(values, 0.75) - numeric::quantile(values, 0.25);
  // identical samples leave roundoff residue in the variance, so the
  // degeneracy test is relative to the data scale
  const double tiny = 1e-12 * std::max(1.0, std::abs(samples.mean()));
  double spread = std::min(sd, iqr / 1.34);
  if (spread <= tiny) spread = sd;
  if (spread <= tiny) {
    if (degenerate) *degenerate = true;
    spread = std::abs(samples.mean());
  }
  if (spread <= tiny) spread = 0.01;  // all samples at (or straddling) zero
  return 0.9 * spread * std::pow(static_cast<double>(m), -0.2);
}

}  // namespace

double silverman_bandwidth(const Eigen::VectorXd& samples) {
  bool degenerate = false;
  const double h = silverman_bandwidth_impl(samples, &degenerate);
  if (degenerate)
    std::cerr << "warning: zero-variance subject under Silverman's rule; "
                 "bandwidth falls back to the data-magnitude scale ("
              << h << ")\n";
  return h;
}

std::vector<double> resolve_bandwidths(const Dataset& ds,
                                       const BandwidthRule& rule) {
  std::vector<double> h(static_cast<std::size_t>(ds.size()));
  if (rule.kind == BandwidthRule::Kind::fixed) {
    if (rule.fixed_h < 0.0) throw config_error("fixed bandwidth must be >= 0");
    std::fill(h.begin(), h.end(), rule.fixed_h);
    return h;
  }
  int degenerate_count = 0;
  for (int i = 0; i < ds.size(); ++i) {
    bool degenerate = false;
    h[static_cast<std::size_t>(i)] = silverman_bandwidth_impl(
        ds.subjects[static_cast<std::size_t>(i)].samples.col(0), &degenerate);
    if (degenerate) ++degenerate_count;
  }
  if (degenerate_count > 0)
    std::cerr << "warning: " << degenerate_count << " zero-variance subject(s)"
              << " under Silverman's rule; bandwidth falls back to the"
              << " data-magnitude scale\n";
  return h;
}

namespace {

// Exact integral of the Gaussian kernel against two Gaussian KDE mixtures:
// each (u, v) term contributes sqrt(l / s2) * exp(-(a_u - b_v)^2 / (2 s2))
// with s2 = l + h_a^2 + h_b^2.
double kde_pair_gaussian(double lengthscale, const Eigen::ArrayXd& a, double ha,
                         const Eigen::ArrayXd& b, double hb) {
  const double s2 = lengthscale + ha * ha + hb * hb;
  const double scale = std::sqrt(lengthscale / s2);
  const double inv2 = 1.0 / (2.0 * s2);
  double total = 0.0;
  for (Eigen::Index u = 0; u < a.size(); ++u)
    total += (-(b - a(u)).square() * inv2).exp().sum();
  return scale * total /
         (static_cast<double>(a.size()) * static_cast<double>(b.size()));
}

// Simpson nodes/weights for one subject's KDE support window.
struct QuadratureGrid {
  Eigen::ArrayXd nodes;
  Eigen::ArrayXd weighted_density;  // simpson weight * KDE density
};

constexpr int kQuadraturePoints = 2001;

QuadratureGrid kde_density_grid(const Eigen::ArrayXd& samples, double h) {
  const double lo = samples.minCoeff() - 5.0 * h;
  const double hi = samples.maxCoeff() + 5.0 * h;
  QuadratureGrid grid;
  grid.nodes = Eigen::ArrayXd::LinSpaced(kQuadraturePoints, lo, hi);
  const double step = (hi - lo) / (kQuadraturePoints - 1);
  Eigen::ArrayXd density = Eigen::ArrayXd::Zero(kQuadraturePoints);
  const double norm =
      1.0 / (static_cast<double>(samples.size()) * h * std::sqrt(2.0 * 3.14159265358979323846));
  for (Eigen::Index u = 0; u < samples.size(); ++u)
    density += (-((grid.nodes - samples(u)) / h).square() * 0.5).exp();
  density *= norm;
  Eigen::ArrayXd w = Eigen::ArrayXd::Constant(kQuadraturePoints, 2.0);
  for (Eigen::Index i = 1; i < kQuadraturePoints; i += 2) w(i) = 4.0;
  w(0) = 1.0;
  w(kQuadraturePoints - 1) = 1.0;
  grid.weighted_density = density * w * (step / 3.0);
  return grid;
}

// One-sided smoothing: integral of K(s, .) against a KDE density, evaluated
// by Simpson on the density's support window.
double kde_point_quadrature(const KernelSpec& spec, double s,
                            const QuadratureGrid& grid) {
  Eigen::MatrixXd pts(grid.nodes.size(), 1);
  pts.col(0) = grid.nodes.matrix();
  Eigen::VectorXd k = kernel_row(spec, pts, Eigen::VectorXd::Constant(1, s));
  return (k.array() * grid.weighted_density).sum();
}

double kde_pair_quadrature(const KernelSpec& spec, const Eigen::ArrayXd& a,
                           double ha, const Eigen::ArrayXd& b, double hb) {
  if (ha == 0.0 && hb == 0.0) {
    Eigen::MatrixXd ma(a.size(), 1), mb(b.size(), 1);
    ma.col(0) = a.matrix();
    mb.col(0) = b.matrix();
    return subject_kernel(spec, ma, mb);
  }
  if (ha == 0.0) {
    const QuadratureGrid gb = kde_density_grid(b, hb);
    double total = 0.0;
    for (Eigen::Index u = 0; u < a.size(); ++u)
      total += kde_point_quadrature(spec, a(u), gb);
    return total / static_cast<double>(a.size());
  }
  if (hb == 0.0) return kde_pair_quadrature(spec, b, hb, a, ha);
  const QuadratureGrid ga = kde_density_grid(a, ha);
  const QuadratureGrid gb = kde_density_grid(b, hb);
  Eigen::MatrixXd pts(gb.nodes.size(), 1);
  pts.col(0) = gb.nodes.matrix();
  double total = 0.0;
  for (Eigen::Index i = 0; i < ga.nodes.size(); ++i) {
    Eigen::VectorXd k =
        kernel_row(spec, pts, Eigen::VectorXd::Constant(1, ga.nodes(i)));
    total += ga.weighted_density(i) * (k.array() * gb.weighted_density).sum();
  }
  return total;
}

void check_kde_supported(const KernelSpec& spec, bool allow_quadrature) {
  if (spec.dim != 1)
    throw config_error("KDE provider supports d=1 only");
  if (spec.family != KernelFamily::gaussian && !allow_quadrature)
    throw config_error(
        "KDE provider has closed form only for the Gaussian kernel; pass "
        "allow_quadrature (CLI: kde_quadrature = true) for the slow Simpson "
        "fallback");
}

}  // namespace

double kde_subject_kernel(const KernelSpec& spec, const Eigen::VectorXd& a,
                          double h_a, const Eigen::VectorXd& b, double h_b,
                          bool allow_quadrature) {
  spec.validate();
  check_kde_supported(spec, allow_quadrature);
  if (a.size() == 0 || b.size() == 0)
    throw config_error("kde_subject_kernel needs nonempty sample sets");
  if (spec.family == KernelFamily::gaussian)
    return kde_pair_gaussian(spec.lengthscale, a.array(), h_a, b.array(), h_b);
  return kde_pair_quadrature(spec, a.array(), h_a, b.array(), h_b);
}

AveragedGram kde_average_gram(const KernelSpec& spec, const Dataset& ds,
                              const BandwidthRule& rule, bool allow_quadrature,
                              int threads) {
  spec.validate();
  check_dataset(spec, ds);
  check_kde_supported(spec, allow_quadrature);
  AveragedGram out;
  out.provider = GramProvider::kde;
  out.bandwidths = resolve_bandwidths(ds, rule);
  const int n = ds.size();
  out.m.resize(n, n);
  parallel_for(n, threads, [&](int i) {
    const Eigen::VectorXd xi = ds.subjects[static_cast<std::size_t>(i)].samples.col(0);
    const double hi = out.bandwidths[static_cast<std::size_t>(i)];
    for (int j = 0; j <= i; ++j) {
      const Eigen::VectorXd xj =
          ds.subjects[static_cast<std::size_t>(j)].samples.col(0);
      out.m(i, j) = kde_subject_kernel(spec, xi, hi, xj,
                                       out.bandwidths[static_cast<std::size_t>(j)],
                                       allow_quadrature);
    }
  });
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < i; ++j) out.m(j, i) = out.m(i, j);
  return out;
}

Eigen::VectorXd kde_cross_vector(const KernelSpec& spec, const Dataset& ds,
                                 const BandwidthRule& rule,
                                 const Eigen::VectorXd& s,
                                 bool allow_quadrature) {
  spec.validate();
  check_dataset(spec, ds);
  check_kde_supported(spec, allow_quadrature);
  if (s.size() != 1) throw config_error("kde_cross_vector: point must be 1-D");
  const auto h = resolve_bandwidths(ds, rule);
  Eigen::VectorXd out(ds.size());
  Eigen::VectorXd point = s;
  for (int i = 0; i < ds.size(); ++i) {
    const Eigen::VectorXd xi = ds.subjects[static_cast<std::size_t>(i)].samples.col(0);
    out(i) = kde_subject_kernel(spec, point, 0.0, xi,
                                h[static_cast<std::size_t>(i)], allow_quadrature);
  }
  return out;
}

Eigen::MatrixXd kde_cross_matrix(const KernelSpec& spec, const Dataset& ds,
                                 const BandwidthRule& rule,
                                 const Eigen::MatrixXd& grid,
                                 bool allow_quadrature, int threads) {
  spec.validate();
  check_dataset(spec, ds);
  check_kde_supported(spec, allow_quadrature);
  if (grid.cols() != 1)
    throw config_error("kde_cross_matrix: grid must be 1-D");
  const auto h = resolve_bandwidths(ds, rule);
  Eigen::MatrixXd out(ds.size(), grid.rows());
  parallel_for(static_cast<int>(grid.rows()), threads, [&](int g) {
    const Eigen::VectorXd point = grid.row(g).transpose();
    for (int i = 0; i < ds.size(); ++i) {
      const Eigen::VectorXd xi =
          ds.subjects[static_cast<std::size_t>(i)].samples.col(0);
      out(i, g) = kde_subject_kernel(spec, point, 0.0, xi,
                                     h[static_cast<std::size_t>(i)],
                                     allow_quadrature);
    }
  });
  return out;
}

double embedding_distance_sq(const KernelSpec& spec,
                             const DiscreteDistribution& z,
                             const Eigen::MatrixXd& samples) {
  spec.validate();
  if (spec.dim != 1)
    throw config_error("embedding_distance_sq supports d=1 distributions");
  z.validate();
  if (samples.rows() == 0 || samples.cols() != 1)
    throw config_error("embedding_distance_sq needs nonempty 1-D samples");

  const Eigen::Index m = samples.rows();
  const Eigen::Index k = z.atoms.size();
  Eigen::MatrixXd atom_pts(k, 1);
  atom_pts.col(0) = z.atoms;

  const double emp_emp = pair_average(spec, samples, samples);
  double emp_z = 0.0;
  for (Eigen::Index u = 0; u < m; ++u)
    emp_z += kernel_row(spec, atom_pts, samples.row(u).transpose()).dot(z.weights);
  emp_z /= static_cast<double>(m);
  double z_z = 0.0;
  for (Eigen::Index a = 0; a < k; ++a)
    z_z += z.weights(a) *
           kernel_row(spec, atom_pts, atom_pts.row(a).transpose()).dot(z.weights);

  return emp_emp - 2.0 * emp_z + z_z;
}

}  // namespace gpdr
