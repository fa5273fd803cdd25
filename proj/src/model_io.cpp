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

#include "gpdr/model_io.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

#include "gpdr/errors.hpp"

namespace gpdr {

namespace {

using nlohmann::json;

constexpr const char* kSchema = "gpdr-model-v1";

json config_to_json(const FitConfig& cfg) {
  json j;
  j["sigma2"] = cfg.sigma2;
  j["jitter"] = cfg.jitter;
  j["provider"] = to_string(cfg.provider);
  j["bandwidth_rule"] =
      cfg.bandwidth.kind == BandwidthRule::Kind::silverman ? "silverman"
                                                           : "fixed";
  j["bandwidth_fixed_h"] = cfg.bandwidth.fixed_h;
  j["allow_quadrature"] = cfg.allow_quadrature;
  return j;
}

FitConfig config_from_json(const json& j) {
  FitConfig cfg;
  cfg.sigma2 = j.at("sigma2").get<double>();
  cfg.jitter = j.at("jitter").get<double>();
  cfg.provider = gram_provider_from_string(j.at("provider").get<std::string>());
  const auto rule = j.at("bandwidth_rule").get<std::string>();
  if (rule == "silverman")
    cfg.bandwidth = BandwidthRule::silverman();
  else if (rule == "fixed")
    cfg.bandwidth = BandwidthRule::fixed(j.at("bandwidth_fixed_h").get<double>());
  else
    throw config_error("model: unknown bandwidth rule '" + rule + "'");
  cfg.allow_quadrature = j.at("allow_quadrature").get<bool>();
  return cfg;
}

}  // namespace

std::string model_to_json(const ExactPosterior& post) {
  json j;
  j["schema"] = kSchema;
  const KernelSpec& spec = post.kernel();
  j["kernel"] = {{"family", to_string(spec.family)},
                 {"lengthscale", spec.lengthscale},
                 {"smoothness", spec.smoothness},
                 {"dim", spec.dim}};
  j["config"] = config_to_json(post.config());
  json ids = json::array();
  for (const Subject& s : post.dataset().subjects) ids.push_back(s.id);
  j["training_ids"] = std::move(ids);
  json alpha = json::array();
  for (Eigen::Index i = 0; i < post.alpha().size(); ++i)
    alpha.push_back(post.alpha()(i));
  j["alpha"] = std::move(alpha);
  json outcomes = json::array();
  for (Eigen::Index i = 0; i < post.training_outcomes().size(); ++i)
    outcomes.push_back(post.training_outcomes()(i));
  j["training_outcomes"] = std::move(outcomes);
  return j.dump(2);
}

ExactPosterior model_from_json(const std::string& text, const Dataset& ds) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw config_error(std::string("model JSON parse failure: ") + e.what());
  }
  if (j.value("schema", "") != kSchema)
    throw config_error("model schema is not " + std::string(kSchema));

  KernelSpec spec;
  const json& jk = j.at("kernel");
  spec.family = kernel_family_from_string(jk.at("family").get<std::string>());
  spec.lengthscale = jk.at("lengthscale").get<double>();
  spec.smoothness = jk.at("smoothness").get<double>();
  spec.dim = jk.at("dim").get<int>();
  const FitConfig cfg = config_from_json(j.at("config"));

  const auto& ids = j.at("training_ids");
  if (ids.size() != static_cast<std::size_t>(ds.size()))
    throw config_error("model: dataset has " + std::to_string(ds.size()) +
                       " subjects, model expects " + std::to_string(ids.size()));
  for (int i = 0; i < ds.size(); ++i)
    if (ids[static_cast<std::size_t>(i)].get<std::string>() !=
        ds.subjects[static_cast<std::size_t>(i)].id)
      throw config_error("model: training id mismatch at position " +
                         std::to_string(i));

  Eigen::VectorXd y(ds.size());
  const auto& outcomes = j.at("training_outcomes");
  if (outcomes.size() != static_cast<std::size_t>(ds.size()))
    throw config_error("model: training_outcomes length mismatch");
  for (int i = 0; i < ds.size(); ++i)
    y(i) = outcomes[static_cast<std::size_t>(i)].get<double>();

  // Refit the factorization; alpha comes from the file. A large residual
  // means the dataset does not match the one the model was fit on.
  AveragedGram gram =
      cfg.provider == GramProvider::empirical
          ? average_gram(spec, ds, cfg.threads)
          : kde_average_gram(spec, ds, cfg.bandwidth, cfg.allow_quadrature,
                             cfg.threads);
  ExactPosterior post = ExactPosterior::build(ds, spec, cfg, std::move(gram), y);

  const auto& alpha_json = j.at("alpha");
  if (alpha_json.size() != static_cast<std::size_t>(ds.size()))
    throw config_error("model: alpha length mismatch");
  Eigen::VectorXd alpha(ds.size());
  for (int i = 0; i < ds.size(); ++i)
    alpha(i) = alpha_json[static_cast<std::size_t>(i)].get<double>();
  const double drift = (alpha - post.alpha()).cwiseAbs().maxCoeff();
  if (drift > 1e-6 * std::max(1.0, alpha.cwiseAbs().maxCoeff()))
    throw numeric_error(
        "model: stored alpha is inconsistent with the refit system "
        "(max drift " +
        std::to_string(drift) + "); wrong dataset?");
  return post;
}

void save_model_file(const ExactPosterior& post, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw config_error("cannot write " + path);
  out << model_to_json(post) << "\n";
}

ExactPosterior load_model_file(const std::string& path, const Dataset& ds) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return model_from_json(buffer.str(), ds);
}

}  // namespace gpdr
