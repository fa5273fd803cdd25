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

#include <CLI11.hpp>
#include <filesystem>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>

#include "gpdr/cli_support.hpp"
#include "gpdr/errors.hpp"
#include "gpdr/eval.hpp"
#include "gpdr/exact.hpp"
#include "gpdr/lowrank.hpp"
#include "gpdr/model_io.hpp"
#include "gpdr/nonlinear.hpp"
#include "gpdr/numeric.hpp"
#include "gpdr/sim.hpp"

namespace {

using gpdr::cli::Config;
using gpdr::cli::format_double;

struct CommonFlags {
  std::string config_path;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::optional<std::string> out;
};

Config load_config(const CommonFlags& flags) {
  Config config = flags.config_path.empty()
                      ? Config()
                      : Config::from_file(flags.config_path);
  for (const std::string& kv : flags.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0)
      throw gpdr::config_error("--set expects key=value, got '" + kv + "'");
    config.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (flags.seed) config.set("seed", std::to_string(*flags.seed));
  if (flags.threads) config.set("threads", std::to_string(*flags.threads));
  if (flags.out) config.set("out", *flags.out);
  return config;
}

std::string out_path(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

gpdr::KernelSpec read_kernel(Config& config) {
  gpdr::KernelSpec spec;
  spec.family =
      gpdr::kernel_family_from_string(config.get_string("family", "gaussian"));
  spec.lengthscale = config.get_double("lengthscale", 0.25);
  spec.smoothness = config.get_double("smoothness", 2.5);
  spec.dim = config.get_int("dim", 1);
  spec.validate();
  return spec;
}

gpdr::Regime read_regime(Config& config) {
  const std::string name = config.get_string("regime", "dp");
  if (name == "dp") return gpdr::Regime::dp(config.get_double("alpha", 25.0));
  if (name == "logitnormal")
    return gpdr::Regime::logitnormal(config.get_double("rho", 0.0));
  throw gpdr::config_error("unknown regime '" + name +
                           "' (expected dp or logitnormal)");
}

gpdr::BandwidthRule read_bandwidth(Config& config) {
  const std::string raw = config.get_string("bandwidth", "silverman");
  if (raw == "silverman") return gpdr::BandwidthRule::silverman();
  try {
    std::size_t used = 0;
    const double h = std::stod(raw, &used);
    if (used != raw.size()) throw std::invalid_argument(raw);
    return gpdr::BandwidthRule::fixed(h);
  } catch (const std::exception&) {
    throw gpdr::config_error(
        "config key 'bandwidth': expected silverman or a number, got '" + raw +
        "'");
  }
}

gpdr::FitConfig read_fit_config(Config& config) {
  gpdr::FitConfig cfg;
  cfg.sigma2 = config.get_double("sigma2", 0.01);
  cfg.jitter = config.get_double("jitter", 1e-8);
  cfg.provider = gpdr::gram_provider_from_string(
      config.get_string("provider", "empirical"));
  cfg.bandwidth = read_bandwidth(config);
  cfg.allow_quadrature = config.get_bool("kde_quadrature", false);
  cfg.threads = config.get_int("threads", 0);
  cfg.validate();
  return cfg;
}

Eigen::MatrixXd read_grid(Config& config, int default_points) {
  const double lo = config.get_double("grid_min", 0.0);
  const double hi = config.get_double("grid_max", 1.0);
  const int points = config.get_int("grid_points", default_points);
  if (points < 2 || !(hi > lo))
    throw gpdr::config_error("grid needs grid_min < grid_max and >= 2 points");
  Eigen::MatrixXd grid(points, 1);
  grid.col(0) = gpdr::numeric::linspace(lo, hi, points);
  return grid;
}

void write_manifest(const std::string& dir, const std::string& subcommand,
                    const Config& config,
                    const std::vector<gpdr::cli::ManifestInput>& inputs) {
  gpdr::cli::atomic_write(out_path(dir, "manifest.json"),
                          gpdr::cli::manifest_json(subcommand, config, inputs));
}

void cmd_simulate(Config& config) {
  const gpdr::Regime regime = read_regime(config);
  const int n = config.get_int("n", 50);
  const int m = config.get_int("m", 100);
  const std::string f0_name = config.get_string("f0", "bump10");
  const double sigma2 = config.get_double("sigma2", 0.01);
  const std::uint64_t seed = config.get_u64("seed", 0);
  const std::string dir = config.get_string("out", ".");
  config.reject_unknown();

  const auto [ds, truth] =
      gpdr::generate_dataset(regime, n, m, f0_name, sigma2, seed);

  std::ostringstream samples;
  samples << "subject_id,dim_1\n";
  for (const auto& subject : ds.subjects)
    for (Eigen::Index j = 0; j < subject.samples.rows(); ++j)
      samples << subject.id << ',' << format_double(subject.samples(j, 0))
              << "\n";
  gpdr::cli::atomic_write(out_path(dir, "samples.csv"), samples.str());

  std::ostringstream outcomes;
  outcomes << "subject_id,y\n";
  for (const auto& subject : ds.subjects)
    outcomes << subject.id << ',' << format_double(subject.outcome) << "\n";
  gpdr::cli::atomic_write(out_path(dir, "outcomes.csv"), outcomes.str());

  std::ostringstream truth_csv;
  truth_csv << "subject_id,c_or_natoms,E_Z_f0,y_noiseless\n";
  for (const auto& record : truth) {
    truth_csv << record.subject_id << ',';
    if (record.distribution)
      truth_csv << record.distribution->atoms.size();
    else
      truth_csv << format_double(*record.c);
    truth_csv << ',' << format_double(record.e_f0) << ','
              << format_double(record.y_noiseless) << "\n";
  }
  gpdr::cli::atomic_write(out_path(dir, "truth.csv"), truth_csv.str());
  write_manifest(dir, "simulate", config, {});
}

void cmd_fit(Config& config) {
  const std::string samples = config.require_string("samples");
  const std::string outcomes = config.require_string("outcomes");
  const std::string method = config.get_string("method", "exact");
  const gpdr::KernelSpec spec = read_kernel(config);
  const gpdr::FitConfig fit_cfg = read_fit_config(config);
  const Eigen::MatrixXd grid = read_grid(config, 201);
  const std::string dir = config.get_string("out", ".");
  const int rank = config.get_int("rank", 10);
  const bool use_gcv = config.get_bool("gcv", false);
  config.reject_unknown();

  const gpdr::Dataset ds = gpdr::load_dataset(samples, outcomes);
  std::ostringstream fhat;

  if (method == "exact") {
    const gpdr::ExactPosterior post = fit_exact(ds, spec, fit_cfg);
    const Eigen::VectorXd mean = post.posterior_mean(grid);
    const Eigen::VectorXd var = post.posterior_cov(grid).diagonal();
    fhat << "s,mean,sd\n";
    for (Eigen::Index i = 0; i < grid.rows(); ++i)
      fhat << format_double(grid(i, 0)) << ',' << format_double(mean(i)) << ','
           << format_double(std::sqrt(std::max(0.0, var(i)))) << "\n";
    gpdr::cli::atomic_write(out_path(dir, "model.json"),
                            gpdr::model_to_json(post) + "\n");
  } else if (method == "lowrank") {
    double sigma2 = fit_cfg.sigma2;
    if (use_gcv)
      sigma2 = gpdr::gcv_score(ds, spec, rank, gpdr::default_gcv_grid(),
                               fit_cfg.threads)
                   .best_sigma2;
    const gpdr::LowRankFit fit =
        gpdr::fit_lowrank(ds, spec, rank, sigma2, fit_cfg.threads);
    const Eigen::VectorXd mean =
        gpdr::lowrank_function(fit, ds, spec, grid, fit_cfg.threads);
    fhat << "s,mean\n";
    for (Eigen::Index i = 0; i < grid.rows(); ++i)
      fhat << format_double(grid(i, 0)) << ',' << format_double(mean(i))
           << "\n";
    std::ostringstream model;
    model << "{\n  \"schema\": \"gpdr-model-v1\",\n  \"method\": \"lowrank\",\n"
          << "  \"rank\": " << fit.rank << ",\n  \"sigma2\": "
          << format_double(fit.sigma2) << ",\n  \"weights\": [";
    for (Eigen::Index i = 0; i < fit.w.size(); ++i)
      model << (i ? ", " : "") << format_double(fit.w(i));
    model << "]\n}\n";
    gpdr::cli::atomic_write(out_path(dir, "model.json"), model.str());
  } else {
    throw gpdr::config_error("unknown fit method '" + method +
                             "' (expected exact or lowrank)");
  }
  gpdr::cli::atomic_write(out_path(dir, "fhat.csv"), fhat.str());
  write_manifest(dir, "fit", config,
                 {{"samples", gpdr::cli::file_digest(samples)},
                  {"outcomes", gpdr::cli::file_digest(outcomes)}});
}

void cmd_risk(Config& config) {
  gpdr::ComparisonGrid grid;
  grid.regime = read_regime(config);
  grid.n_values = config.get_int_list("n_list", {50, 100, 200});
  grid.m_values = config.get_int_list("m_list", {50, 500});
  grid.reps = config.get_int("reps", 20);
  grid.f0_name = config.get_string("f0", "bump10");
  grid.sigma2 = config.get_double("sigma2", 0.01);
  grid.spec = read_kernel(config);
  grid.risk_grid_size = config.get_int("grid_points", 201);
  grid.risk_draws = config.get_int("draws", 100);
  grid.run_kde = config.get_bool("kde", true);
  const std::string kde_bw = config.get_string("kde_bandwidth", "kernel");
  if (kde_bw == "kernel") {
    // m-independent smoothing at the kernel scale (the harness default)
  } else if (kde_bw == "silverman") {
    grid.kde_bandwidth = gpdr::BandwidthRule::silverman();
  } else {
    try {
      std::size_t used = 0;
      const double h = std::stod(kde_bw, &used);
      if (used != kde_bw.size()) throw std::invalid_argument(kde_bw);
      grid.kde_bandwidth = gpdr::BandwidthRule::fixed(h);
    } catch (const std::exception&) {
      throw gpdr::config_error(
          "config key 'kde_bandwidth': expected kernel, silverman, or a "
          "number, got '" + kde_bw + "'");
    }
  }
  const std::uint64_t seed = config.get_u64("seed", 0);
  const int threads = config.get_int("threads", 0);
  const std::string dir = config.get_string("out", ".");
  config.reject_unknown();

  const auto result = gpdr::compare_methods(grid, seed, threads);

  std::ostringstream risk;
  risk << "n,m,regime,method,rep,seed,risk\n";
  for (const auto& cell : result.cells)
    for (std::size_t rep = 0; rep < cell.risks.size(); ++rep)
      risk << cell.n << ',' << cell.m << ',' << cell.regime << ','
           << cell.method << ',' << rep << ',' << cell.seeds[rep] << ','
           << format_double(cell.risks[rep]) << "\n";
  gpdr::cli::atomic_write(out_path(dir, "risk.csv"), risk.str());

  if (!result.ratios.empty()) {
    std::ostringstream ratio;
    ratio << "n,m,regime,ratio_mean,ratio_ci_lo,ratio_ci_hi\n";
    for (const auto& row : result.ratios)
      ratio << row.n << ',' << row.m << ',' << row.regime << ','
            << format_double(row.ratio_mean) << ',' << format_double(row.ci_lo)
            << ',' << format_double(row.ci_hi) << "\n";
    gpdr::cli::atomic_write(out_path(dir, "ratio.csv"), ratio.str());
  }
  write_manifest(dir, "risk", config, {});
}

void cmd_cv(Config& config) {
  const std::string samples = config.require_string("samples");
  const std::string outcomes = config.require_string("outcomes");
  gpdr::CvMethod method;
  const std::string kind = config.get_string("method", "exact");
  if (kind == "exact")
    method.kind = gpdr::CvMethod::Kind::exact;
  else if (kind == "lowrank")
    method.kind = gpdr::CvMethod::Kind::lowrank;
  else
    throw gpdr::config_error("unknown cv method '" + kind + "'");
  method.spec = read_kernel(config);
  method.fit = read_fit_config(config);
  method.rank = config.get_int("rank", 10);
  method.gcv = config.get_bool("gcv", false);
  const int folds = config.get_int("folds", 5);
  const int reps = config.get_int("reps", 100);
  const std::uint64_t seed = config.get_u64("seed", 0);
  const std::string dir = config.get_string("out", ".");
  config.reject_unknown();

  const gpdr::Dataset ds = gpdr::load_dataset(samples, outcomes);
  const auto result = gpdr::cross_validate(ds, method, folds, reps, seed);

  std::ostringstream csv;
  csv << "method,folds,reps,r2_mean,r2_ci_lo,r2_ci_hi\n";
  csv << kind << ',' << folds << ',' << reps << ','
      << format_double(result.r2_mean) << ',' << format_double(result.ci_lo)
      << ',' << format_double(result.ci_hi) << "\n";
  gpdr::cli::atomic_write(out_path(dir, "cv.csv"), csv.str());
  write_manifest(dir, "cv", config,
                 {{"samples", gpdr::cli::file_digest(samples)},
                  {"outcomes", gpdr::cli::file_digest(outcomes)}});
}

void cmd_nonlinear(Config& config) {
  const std::string samples = config.require_string("samples");
  const std::string outcomes = config.require_string("outcomes");
  const gpdr::KernelSpec spec = read_kernel(config);
  const int degree = config.get_int("degree", 4);
  const double tau2 = config.get_double("tau2", 0.25);
  const int iters = config.get_int("iters", 4000);
  const int burnin = config.get_int("burnin", iters / 2);
  const std::uint64_t seed = config.get_u64("seed", 0);
  const Eigen::MatrixXd grid = read_grid(config, 101);
  const double prob_lo = config.get_double("prob_lo", 0.05);
  const double prob_hi = config.get_double("prob_hi", 0.95);
  const int link_points = config.get_int("link_points", 101);
  const std::string dir = config.get_string("out", ".");

  gpdr::NonlinearOptions options;
  options.sigma2_init = config.get_double("sigma2_init", 1.0);
  options.log_sigma2_step = config.get_double("step", 0.2);
  const std::string fix_link = config.get_string("fix_link", "");
  if (fix_link == "identity") {
    if (degree < 2) throw gpdr::config_error("identity clamp needs degree >= 2");
    Eigen::VectorXd gamma = Eigen::VectorXd::Zero(degree);
    gamma(1) = 1.0;
    options.fixed_gamma = gamma;
  } else if (!fix_link.empty()) {
    throw gpdr::config_error("fix_link supports only 'identity'");
  }
  const double fixed_sigma2 = config.get_double("fix_sigma2", 0.0);
  if (fixed_sigma2 > 0.0) options.fixed_sigma2 = fixed_sigma2;
  config.reject_unknown();

  const gpdr::Dataset ds = gpdr::load_dataset(samples, outcomes);
  const gpdr::LinkBasis basis = gpdr::LinkBasis::monomials(degree, tau2);
  const gpdr::NonlinearChain chain =
      gpdr::fit_nonlinear_mcmc(ds, spec, basis, iters, burnin, seed, options);
  const gpdr::ChainSummary summary = gpdr::summarize_chain(
      chain, ds, spec, grid, prob_lo, prob_hi, link_points);

  std::ostringstream chain_csv;
  chain_csv << "iter,sigma2,log_posterior";
  for (int r = 1; r <= degree; ++r) chain_csv << ",gamma_" << r;
  chain_csv << "\n";
  for (int it = 0; it < chain.size(); ++it) {
    chain_csv << it << ',' << format_double(chain.sigma2_draws(it)) << ','
              << format_double(chain.log_posterior(it));
    for (int r = 0; r < degree; ++r)
      chain_csv << ',' << format_double(chain.gamma_draws(it, r));
    chain_csv << "\n";
  }
  gpdr::cli::atomic_write(out_path(dir, "chain.csv"), chain_csv.str());

  std::ostringstream f_csv;
  f_csv << "s,mean,q05,q95\n";
  for (Eigen::Index i = 0; i < summary.f_grid.size(); ++i)
    f_csv << format_double(summary.f_grid(i)) << ','
          << format_double(summary.f_mean(i)) << ','
          << format_double(summary.f_lo(i)) << ','
          << format_double(summary.f_hi(i)) << "\n";
  gpdr::cli::atomic_write(out_path(dir, "f_summary.csv"), f_csv.str());

  std::ostringstream link_csv;
  link_csv << "x,mean,q05,q95\n";
  for (Eigen::Index i = 0; i < summary.link_grid.size(); ++i)
    link_csv << format_double(summary.link_grid(i)) << ','
             << format_double(summary.link_mean(i)) << ','
             << format_double(summary.link_lo(i)) << ','
             << format_double(summary.link_hi(i)) << "\n";
  gpdr::cli::atomic_write(out_path(dir, "link_summary.csv"), link_csv.str());

  write_manifest(dir, "nonlinear", config,
                 {{"samples", gpdr::cli::file_digest(samples)},
                  {"outcomes", gpdr::cli::file_digest(outcomes)}});
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gaussian process regression for distribution-valued covariates"};
  app.require_subcommand(1);

  CommonFlags flags;
  std::function<void(Config&)> action;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", flags.config_path, "key = value config file");
    sub->add_option("--set", flags.overrides,
                    "override a config key (key=value, repeatable)");
    sub->add_option("--seed", flags.seed, "RNG seed (overrides config)");
    sub->add_option("--threads", flags.threads,
                    "worker threads (0 = all cores)");
    sub->add_option("--out", flags.out, "output directory");
  };

  CLI::App* simulate =
      app.add_subcommand("simulate", "draw a synthetic dataset with truth");
  add_common(simulate);
  simulate->callback([&] { action = cmd_simulate; });

  CLI::App* fit = app.add_subcommand("fit", "fit GPDR and export the curve");
  add_common(fit);
  fit->callback([&] { action = cmd_fit; });

  CLI::App* risk = app.add_subcommand(
      "risk", "simulation risk comparison of GPDR against the KDE baseline");
  add_common(risk);
  risk->callback([&] { action = cmd_risk; });

  CLI::App* cv =
      app.add_subcommand("cv", "k-fold cross-validated predictive R^2");
  add_common(cv);
  cv->callback([&] { action = cmd_cv; });

  CLI::App* nonlinear = app.add_subcommand(
      "nonlinear", "single-index GPDR with an unknown link, by MCMC");
  add_common(nonlinear);
  nonlinear->callback([&] { action = cmd_nonlinear; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    Config config = load_config(flags);
    action(config);
    return 0;
  } catch (const gpdr::config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const gpdr::numeric_error& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
