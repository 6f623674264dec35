// Copyright 2026 The Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace nrmab {

inline constexpr const char* kVersion = "0.1.0";

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::string& path);

// Reproducibility record written next to every command's outputs: the full
// resolved configuration, master seeds, and a content digest per output
// file. Re-running with the same inputs must reproduce identical digests
// (wall-clock measurements are flagged nondeterministic).
struct RunManifest {
  std::string command;
  nlohmann::json config;
  std::vector<std::uint64_t> seeds;
  std::vector<std::pair<std::string, std::string>> outputs;  // path, digest
  double duration_ms = 0.0;
  bool deterministic = true;

  void add_output(const std::string& path);
  nlohmann::json to_json() const;
  void save(const std::string& path) const;
};

void write_text_file(const std::string& path, const std::string& content);

}  // namespace nrmab
