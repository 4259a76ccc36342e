// Copyright 2026 The adsem Authors
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

#include "adsem/config_file.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "adsem/error.hpp"
#include "adsem/text.hpp"

namespace adsem {

ConfigValues parse_config(std::string_view text) {
  ConfigValues values;
  std::istringstream in{std::string(text)};
  std::string line;
  std::string section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto body = trim(line);
    if (body.empty() || body.front() == '#' || body.front() == ';') continue;
    if (body.front() == '[') {
      if (body.back() != ']') {
        throw Error(ErrorCode::kParse, "config line " + std::to_string(line_no) + ": unterminated section");
      }
      section = std::string(trim(body.substr(1, body.size() - 2)));
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::kParse, "config line " + std::to_string(line_no) + ": expected key = value");
    }
    std::string key(trim(body.substr(0, eq)));
    std::string value(trim(body.substr(eq + 1)));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
    values[section.empty() ? key : section + "." + key] = value;
  }
  return values;
}

ConfigValues load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open config file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

namespace {

double to_double(const std::string& key, std::string_view v) {
  double out = 0.0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw Error(ErrorCode::kParse, "config key " + key + ": not a number: " + std::string(v));
  }
  return out;
}

int to_int(const std::string& key, std::string_view v) {
  int out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw Error(ErrorCode::kParse, "config key " + key + ": not an integer: " + std::string(v));
  }
  return out;
}

std::string_view bare_key(std::string_view key) {
  for (std::string_view prefix : {"engine.", "similarity.", "graph."}) {
    if (key.starts_with(prefix)) return key.substr(prefix.size());
  }
  return key;
}

}  // namespace

std::vector<std::string> apply_config(const ConfigValues& values, EngineConfig& config) {
  std::vector<std::string> warnings;
  for (const auto& [full_key, value] : values) {
    const std::string_view key = bare_key(full_key);
    if (key == "k_default") {
      config.k_default = to_int(full_key, value);
    } else if (key == "stage1_budget") {
      config.stage1_budget = to_int(full_key, value);
    } else if (key == "depth") {
      config.depth = to_int(full_key, value);
    } else if (key == "blend_alpha") {
      config.blend_alpha = to_double(full_key, value);
    } else if (key == "theta") {
      config.similarity.theta = to_double(full_key, value);
    } else if (key == "attr_weights") {
      std::vector<double> parts;
      std::string_view rest = value;
      while (!rest.empty()) {
        const auto comma = rest.find(',');
        parts.push_back(to_double(full_key, trim(rest.substr(0, comma))));
        if (comma == std::string_view::npos) break;
        rest = rest.substr(comma + 1);
      }
      if (parts.size() != 3) throw Error(ErrorCode::kParse, "attr_weights needs three numbers");
      config.similarity.attr_weights = {parts[0], parts[1], parts[2]};
    } else if (key == "edge_threshold") {
      config.graph.edge_threshold = to_double(full_key, value);
    } else if (key == "max_degree") {
      config.graph.max_degree = to_int(full_key, value);
    } else {
      warnings.push_back("unknown config key ignored: " + full_key);
    }
  }
  return warnings;
}

}  // namespace adsem
