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

#include "gpdr/sim.hpp"

#include <cmath>

#include "gpdr/errors.hpp"
#include "gpdr/numeric.hpp"
#include "gpdr/rng.hpp"

namespace gpdr {

namespace {

constexpr double kTwoPi = 6.28318530717958647692;

// Substream tags for derived per-subject streams.
enum : std::uint64_t {
  kStreamDistribution = 1,
  kStreamSamples = 2,
  kStreamNoise = 3,
};

double logistic(double g) { return 1.0 / (1.0 + std::exp(-g)); }

}  // namespace

void DiscreteDistribution::validate() const {
  if (atoms.size() != weights.size())
    throw config_error("discrete distribution atom/weight length mismatch");
  if (atoms.size() == 0)
    throw config_error("discrete distribution has no atoms");
  if ((weights.array() < 0.0).any())
    throw config_error("discrete distribution has negative weights");
  if (std::abs(weights.sum() - 1.0) > 1e-9)
    throw config_error("discrete distribution weights sum to " +
                       std::to_string(weights.sum()) + ", expected 1");
}

double DiscreteDistribution::expectation(
    const std::function<double(double)>& f) const {
  double acc = 0.0;
  for (Eigen::Index k = 0; k < atoms.size(); ++k)
    acc += weights(k) * f(atoms(k));
  return acc;
}

std::function<double(double)> f0_lookup(const std::string& name) {
  if (name == "bump10")
    return [](double x) { return 10.0 * x * std::exp(-5.0 * x); };
  if (name == "sine")
    return [](double x) { return std::sin(kTwoPi * x); };
  std::string known;
  for (const auto& n : f0_names()) known += (known.empty() ? "" : ", ") + n;
  throw config_error("unknown f0 '" + name + "' (registry: " + known + ")");
}

std::vector<std::string> f0_names() { return {"bump10", "sine"}; }

DiscreteDistribution sample_dp(double alpha, std::uint64_t seed,
                               double truncation_eps, int max_atoms) {
  if (!(alpha > 0.0)) throw config_error("DP concentration must be positive");
  if (max_atoms < 1) throw config_error("sample_dp needs max_atoms >= 1");
  rng::Rng gen(seed);
  std::vector<double> atoms;
  std::vector<double> weights;
  double remaining = 1.0;
  double partial = 0.0;
  while (static_cast<int>(atoms.size()) < max_atoms) {
    // Beta(1, alpha) by inverse CDF.
    const double frac = 1.0 - std::pow(gen.uniform_positive(), 1.0 / alpha);
    const double atom = gen.uniform();
    const double w = remaining * frac;
    atoms.push_back(atom);
    weights.push_back(w);
    partial += w;
    remaining *= (1.0 - frac);
    if (remaining < truncation_eps) break;
  }
  // Residual mass folds into the last atom; the exact-sum form keeps the
  // total at 1 under floating accumulation.
  weights.back() += 1.0 - partial;

  DiscreteDistribution z;
  z.atoms = Eigen::Map<Eigen::VectorXd>(atoms.data(),
                                        static_cast<Eigen::Index>(atoms.size()));
  z.weights = Eigen::Map<Eigen::VectorXd>(
      weights.data(), static_cast<Eigen::Index>(weights.size()));
  z.validate();
  return z;
}

Eigen::VectorXd sample_from_discrete(const DiscreteDistribution& z, int m,
                                     std::uint64_t seed) {
  z.validate();
  if (m < 1) throw config_error("sample_from_discrete needs m >= 1");
  Eigen::VectorXd cumulative(z.weights.size());
  double acc = 0.0;
  for (Eigen::Index k = 0; k < z.weights.size(); ++k) {
    acc += z.weights(k);
    cumulative(k) = acc;
  }
  cumulative(z.weights.size() - 1) = 1.0;

  rng::Rng gen(seed);
  Eigen::VectorXd out(m);
  for (int j = 0; j < m; ++j) {
    const double u = gen.uniform();
    Eigen::Index lo = 0;
    Eigen::Index hi = cumulative.size() - 1;
    while (lo < hi) {
      const Eigen::Index mid = (lo + hi) / 2;
      if (cumulative(mid) > u)
        hi = mid;
      else
        lo = mid + 1;
    }
    out(j) = z.atoms(lo);
  }
  return out;
}

LogitNormalDraw sample_logitnormal_subject(
    int m, double rho, const std::function<double(double)>& f0,
    std::uint64_t seed) {
  if (rho < 0.0 || rho >= 1.0)
    throw config_error("AR(1) coefficient rho must lie in [0, 1)");
  if (m < 1) throw config_error("sample_logitnormal_subject needs m >= 1");
  constexpr double kWithinSd = 0.3;  // sqrt(0.09)
  rng::Rng gen(seed);

  LogitNormalDraw draw;
  draw.c = 2.0 * gen.normal();  // N(0, 4)
  draw.samples.resize(m);
  double g = draw.c + kWithinSd * gen.normal();
  draw.samples(0) = logistic(g);
  const double innovation_sd = kWithinSd * std::sqrt(1.0 - rho * rho);
  for (int j = 1; j < m; ++j) {
    g = draw.c + rho * (g - draw.c) + innovation_sd * gen.normal();
    draw.samples(j) = logistic(g);
  }

  static const auto gh = numeric::gauss_hermite(64);
  const double scale = std::sqrt(2.0) * kWithinSd;
  double acc = 0.0;
  for (Eigen::Index k = 0; k < gh.first.size(); ++k)
    acc += gh.second(k) * f0(logistic(draw.c + scale * gh.first(k)));
  draw.e_f0 = acc / std::sqrt(3.14159265358979323846);
  return draw;
}

std::string Regime::label() const {
  if (kind == Kind::dp) {
    std::string a = std::to_string(alpha);
    a.erase(a.find_last_not_of('0') + 1);
    if (!a.empty() && a.back() == '.') a.pop_back();
    return "dp" + a;
  }
  std::string r = std::to_string(rho);
  r.erase(r.find_last_not_of('0') + 1);
  if (!r.empty() && r.back() == '.') r.pop_back();
  return "logitnormal" + r;
}

std::pair<Dataset, std::vector<TruthRecord>> generate_dataset(
    const Regime& regime, int n, int m, const std::string& f0_name,
    double sigma2, std::uint64_t seed) {
  if (n < 1) throw config_error("generate_dataset needs n >= 1");
  if (m < 1) throw config_error("generate_dataset needs m >= 1");
  if (sigma2 < 0.0) throw config_error("sigma2 must be nonnegative");
  const auto f0 = f0_lookup(f0_name);

  Dataset ds;
  ds.dim = 1;
  ds.subjects.resize(static_cast<std::size_t>(n));
  std::vector<TruthRecord> truth(static_cast<std::size_t>(n));
  const double noise_sd = std::sqrt(sigma2);

  for (int i = 0; i < n; ++i) {
    const auto ui = static_cast<std::uint64_t>(i);
    Subject& subject = ds.subjects[static_cast<std::size_t>(i)];
    TruthRecord& record = truth[static_cast<std::size_t>(i)];
    subject.id = "s" + std::to_string(i + 1);
    record.subject_id = subject.id;
    record.f0_name = f0_name;

    if (regime.kind == Regime::Kind::dp) {
      DiscreteDistribution z =
          sample_dp(regime.alpha, rng::derive(seed, {kStreamDistribution, ui}));
      const Eigen::VectorXd samples =
          sample_from_discrete(z, m, rng::derive(seed, {kStreamSamples, ui}));
      subject.samples = samples;
      record.e_f0 = z.expectation(f0);
      record.distribution = std::move(z);
    } else {
      LogitNormalDraw draw = sample_logitnormal_subject(
          m, regime.rho, f0, rng::derive(seed, {kStreamDistribution, ui}));
      subject.samples = draw.samples;
      record.e_f0 = draw.e_f0;
      record.c = draw.c;
    }
    record.y_noiseless = record.e_f0;
    rng::Rng noise(rng::derive(seed, {kStreamNoise, ui}));
    subject.outcome = record.e_f0 + noise_sd * noise.normal();
  }
  ds.validate();
  return {std::move(ds), std::move(truth)};
}

}  // namespace gpdr
