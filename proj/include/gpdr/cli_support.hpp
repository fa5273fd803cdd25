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

#ifndef GPDR_CLI_SUPPORT_HPP
#define GPDR_CLI_SUPPORT_HPP

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace gpdr::cli {

/// Flat `key = value` run configuration (one pair per line, `#` comments).
/// Lookups record the resolved value, defaulted or not, so the manifest can
/// echo the complete effective configuration of a run.
class Config {
 public:
  static Config from_file(const std::string& path);
  Config() = default;

  /// Flag-style override (wins over the file).
  void set(const std::string& key, const std::string& value);
  bool has(const std::string& key) const;

  std::string get_string(const std::string& key, const std::string& fallback);
  double get_double(const std::string& key, double fallback);
  int get_int(const std::string& key, int fallback);
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback);
  bool get_bool(const std::string& key, bool fallback);
  std::vector<int> get_int_list(const std::string& key,
                                const std::vector<int>& fallback);

  std::string require_string(const std::string& key);

  /// Throws config_error on any file key never consumed by the subcommand
  /// (catches typos before an expensive run).
  void reject_unknown() const;

  /// Every key looked up, with the value that took effect.
  const std::map<std::string, std::string>& resolved() const {
    return resolved_;
  }

 private:
  std::string lookup(const std::string& key, const std::string& fallback);
  std::map<std::string, std::string> values_;
  std::map<std::string, std::string> resolved_;
  std::set<std::string> touched_;
};

/// Writes content to a temp file in the target directory and renames it
/// into place, so interrupted runs never leave a partial final file.
void atomic_write(const std::string& path, const std::string& content);

/// FNV-1a 64-bit digest of a file's bytes, hex-encoded.
std::string file_digest(const std::string& path);

/// Full-precision double formatting (%.17g); round-trips exactly.
std::string format_double(double value);

struct ManifestInput {
  std::string name;
  std::string digest;
};

/// Serializes the run manifest (artifact version, subcommand, resolved
/// config, input digests) as stable JSON.
std::string manifest_json(const std::string& subcommand, const Config& config,
                          const std::vector<ManifestInput>& inputs);

}  // namespace gpdr::cli

#endif  // GPDR_CLI_SUPPORT_HPP
