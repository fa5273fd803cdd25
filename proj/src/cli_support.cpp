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

#include "gpdr/cli_support.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "gpdr/errors.hpp"

namespace gpdr::cli {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::string strip_quotes(const std::string& s) {
  if (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') ||
                        (s.front() == '\'' && s.back() == '\'')))
    return s.substr(1, s.size() - 2);
  return s;
}

}  // namespace

Config Config::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config file " + path);
  Config config;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto comment = line.find('#');
    if (comment != std::string::npos) line.erase(comment);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw config_error(path + " line " + std::to_string(line_no) +
                         ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = strip_quotes(trim(line.substr(eq + 1)));
    if (key.empty())
      throw config_error(path + " line " + std::to_string(line_no) +
                         ": empty key");
    config.values_[key] = value;
  }
  return config;
}

void Config::set(const std::string& key, const std::string& value) {
  values_[key] = value;
}

bool Config::has(const std::string& key) const {
  return values_.count(key) > 0;
}

std::string Config::lookup(const std::string& key, const std::string& fallback) {
  touched_.insert(key);
  const auto found = values_.find(key);
  const std::string value = found == values_.end() ? fallback : found->second;
  resolved_[key] = value;
  return value;
}

std::string Config::get_string(const std::string& key,
                               const std::string& fallback) {
  return lookup(key, fallback);
}

double Config::get_double(const std::string& key, double fallback) {
  const std::string raw = lookup(key, format_double(fallback));
  try {
    std::size_t used = 0;
    const double value = std::stod(raw, &used);
    if (used != raw.size()) throw std::invalid_argument(raw);
    return value;
  } catch (const std::exception&) {
    throw config_error("config key '" + key + "': expected a number, got '" +
                       raw + "'");
  }
}

int Config::get_int(const std::string& key, int fallback) {
  const std::string raw = lookup(key, std::to_string(fallback));
  try {
    std::size_t used = 0;
    const int value = std::stoi(raw, &used);
    if (used != raw.size()) throw std::invalid_argument(raw);
    return value;
  } catch (const std::exception&) {
    throw config_error("config key '" + key + "': expected an integer, got '" +
                       raw + "'");
  }
}

std::uint64_t Config::get_u64(const std::string& key, std::uint64_t fallback) {
  const std::string raw = lookup(key, std::to_string(fallback));
  try {
    std::size_t used = 0;
    const std::uint64_t value = std::stoull(raw, &used);
    if (used != raw.size()) throw std::invalid_argument(raw);
    return value;
  } catch (const std::exception&) {
    throw config_error("config key '" + key +
                       "': expected an unsigned integer, got '" + raw + "'");
  }
}

bool Config::get_bool(const std::string& key, bool fallback) {
  const std::string raw = lookup(key, fallback ? "true" : "false");
  if (raw == "true" || raw == "1" || raw == "yes") return true;
  if (raw == "false" || raw == "0" || raw == "no") return false;
  throw config_error("config key '" + key + "': expected a boolean, got '" +
                     raw + "'");
}

std::vector<int> Config::get_int_list(const std::string& key,
                                      const std::vector<int>& fallback) {
  std::string fallback_str;
  for (std::size_t i = 0; i < fallback.size(); ++i)
    fallback_str += (i ? "," : "") + std::to_string(fallback[i]);
  const std::string raw = lookup(key, fallback_str);
  std::vector<int> out;
  std::stringstream ss(raw);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    cell = trim(cell);
    if (cell.empty()) continue;
    try {
      out.push_back(std::stoi(cell));
    } catch (const std::exception&) {
      throw config_error("config key '" + key + "': bad list entry '" + cell +
                         "'");
    }
  }
  if (out.empty())
    throw config_error("config key '" + key + "': empty list");
  return out;
}

std::string Config::require_string(const std::string& key) {
  touched_.insert(key);
  const auto found = values_.find(key);
  if (found == values_.end())
    throw config_error("missing required config key '" + key + "'");
  resolved_[key] = found->second;
  return found->second;
}

void Config::reject_unknown() const {
  for (const auto& [key, value] : values_)
    if (touched_.count(key) == 0)
      throw config_error("unknown config key '" + key + "'");
}

void atomic_write(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path temp = target.parent_path() /
                        (target.filename().string() + ".tmp");
  {
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    if (!out) throw config_error("cannot write " + temp.string());
    out << content;
    if (!out.flush()) throw config_error("write failed for " + temp.string());
  }
  fs::rename(temp, target);
}

std::string file_digest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw config_error("cannot open " + path + " for hashing");
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  char buffer[4096];
  while (in.read(buffer, sizeof(buffer)) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      hash ^= static_cast<unsigned char>(buffer[i]);
      hash *= 0x100000001b3ULL;
    }
    if (!in) break;
  }
  char hex[20];
  std::snprintf(hex, sizeof(hex), "%016llx",
                static_cast<unsigned long long>(hash));
  return hex;
}

std::string format_double(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

std::string manifest_json(const std::string& subcommand, const Config& config,
                          const std::vector<ManifestInput>& inputs) {
  nlohmann::json j;
  j["schema"] = "gpdr-manifest-v1";
  j["artifact_version"] = "1.0.0";
  j["subcommand"] = subcommand;
  nlohmann::json resolved;
  for (const auto& [key, value] : config.resolved()) resolved[key] = value;
  j["config"] = std::move(resolved);
  nlohmann::json input_json = nlohmann::json::object();
  for (const auto& input : inputs) input_json[input.name] = input.digest;
  j["inputs"] = std::move(input_json);
  return j.dump(2) + "\n";
}

}  // namespace gpdr::cli
