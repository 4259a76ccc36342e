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

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "adsem/catalog.hpp"
#include "adsem/extraction.hpp"

namespace adsem {

// Wire format of the LLM metadata endpoint.
//
// Request (POST endpoint_url, application/json):
//   {"prompts": [{"ad_id": "...", "prompt": "..."}, ...]}
// Response:
//   {"results": [{"categories": [{"label": "...", "score": 0.8}, ...],
//                 "brand": [...], "product": [...], "contextual": [...],
//                 "caption": "..."}, ...]}
// results[i] answers prompts[i].

struct LlmOutcome {
  std::string ad_id;
  std::optional<SemanticMetadata> metadata;  // empty on per-ad failure
  std::string error;
  std::vector<std::string> warnings;
};

// Substitutes {{title}}, {{description}}, {{landing_page_text}} and {{ad_id}}.
std::string render_prompt(std::string_view prompt_template, const Ad& ad);

// Validates one response object and converts it into metadata for `ad`.
// Scores above 1 are clamped to 1 and scores <= 0 dropped, each with a warning.
// Throws kParse when the object does not match the schema.
SemanticMetadata parse_llm_result(const std::string& result_json, const Ad& ad,
                                  const ExtractorConfig& config, std::vector<std::string>& warnings);

// Sends the batch in batch_size slices with at most max_in_flight outstanding
// requests. Outcomes come back in input order. Ads whose response fails schema
// validation are re-requested once and then reported as per-ad errors.
// Throws kUnavailable (naming endpoint_url) when the endpoint cannot be
// reached and kTimeout when it does not answer in time.
std::vector<LlmOutcome> extract_llm(const std::vector<Ad>& batch, const ExtractorConfig& config);

}  // namespace adsem
