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

#include <chrono>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "adsem/catalog.hpp"
#include "adsem/taxonomy.hpp"
#include "adsem/text.hpp"

namespace adsem {

// Retrieval-facing representation of one ad.
struct SemanticMetadata {
  std::string ad_id;
  // label -> score in (0, 1]; std::map keeps iteration sorted by label.
  std::map<std::string, double> categories;
  StringSet brand_attrs;
  StringSet product_attrs;
  StringSet contextual_attrs;
  StringSet phrases;
  StringSet tokens;
  std::string caption;
  // Set when no category could be assigned.
  bool low_coverage = false;

  bool operator==(const SemanticMetadata&) const = default;
};

enum class ExtractorMode { kRuleBased, kLlmEndpoint };

struct ExtractorConfig {
  ExtractorMode mode = ExtractorMode::kRuleBased;
  std::string endpoint_url;
  std::string prompt_template_path;
  int max_categories = 5;
  int batch_size = 16;
  std::chrono::milliseconds timeout{10000};
  int max_in_flight = 4;
  int phrase_n_max = 3;
};

// Throws kInvalidArgument when a bound is violated.
void validate(const ExtractorConfig& config);

// Keeps the `max_categories` best entries ordered by (score desc, label asc).
std::map<std::string, double> truncate_categories(const std::map<std::string, double>& scores,
                                                  int max_categories);

// Deterministic keyword-coverage extractor. Throws kInvalidArgument on an empty taxonomy.
SemanticMetadata extract_rule_based(const Ad& ad, const Taxonomy& taxonomy,
                                    const ExtractorConfig& config = {});

std::vector<SemanticMetadata> extract_rule_based(const AdCatalog& catalog, const Taxonomy& taxonomy,
                                                 const ExtractorConfig& config = {});

// Text-derived sets shared by both extractor paths: phrases from each text
// field, tokens from all fields plus the tokens of every attribute string.
void fill_text_sets(const Ad& ad, int phrase_n_max, SemanticMetadata& meta);

// Metadata cache: one JSON object per line.
std::string metadata_to_json_line(const SemanticMetadata& meta);
SemanticMetadata metadata_from_json_line(const std::string& line);
void save_metadata(const std::vector<SemanticMetadata>& metadata, const std::string& path);
std::vector<SemanticMetadata> load_metadata(const std::string& path);

}  // namespace adsem
