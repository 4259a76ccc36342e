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

#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "adsem/engine.hpp"

namespace adsem {

// key = value lines; '#' and ';' start comments; "[section]" prefixes the
// following keys with "section.". Later duplicates win.
using ConfigValues = std::map<std::string, std::string>;

ConfigValues parse_config(std::string_view text);
ConfigValues load_config(const std::string& path);

// Applies recognized keys to `config`. Keys may appear bare or under an
// [engine], [similarity] or [graph] section:
//   k_default, stage1_budget, depth, blend_alpha,
//   theta, attr_weights (three comma-separated numbers),
//   edge_threshold, max_degree
// Unrecognized keys are returned as warnings. Throws kParse for bad values.
std::vector<std::string> apply_config(const ConfigValues& values, EngineConfig& config);

}  // namespace adsem
