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

#include "adsem/extraction.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "adsem/error.hpp"
#include "json.hpp"

namespace adsem {

using json = nlohmann::json;

void validate(const ExtractorConfig& config) {
  if (config.max_categories < 1) throw Error(ErrorCode::kInvalidArgument, "max_categories must be >= 1");
  if (config.batch_size < 1) throw Error(ErrorCode::kInvalidArgument, "batch_size must be >= 1");
  if (config.max_in_flight < 1) throw Error(ErrorCode::kInvalidArgument, "max_in_flight must be >= 1");
  if (config.phrase_n_max < 2) throw Error(ErrorCode::kInvalidArgument, "phrase_n_max must be >= 2");
}

std::map<std::string, double> truncate_categories(const std::map<std::string, double>& scores,
                                                  int max_categories) {
  std::vector<std::pair<std::string, double>> ranked(scores.begin(), scores.end());
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  if (ranked.size() > static_cast<std::size_t>(max_categories)) ranked.resize(max_categories);
  return {ranked.begin(), ranked.end()};
}

void fill_text_sets(const Ad& ad, int phrase_n_max, SemanticMetadata& meta) {
  for (const std::string* field : {&ad.title, &ad.description, &ad.landing_page_text}) {
    auto tokens = tokenize(*field);
    meta.tokens.insert(tokens.begin(), tokens.end());
    auto phrases = extract_phrases(*field, phrase_n_max);
    meta.phrases.insert(phrases.begin(), phrases.end());
  }
  for (const StringSet* attrs : {&meta.brand_attrs, &meta.product_attrs, &meta.contextual_attrs}) {
    for (const auto& a : *attrs) {
      auto tokens = tokenize(a);
      meta.tokens.insert(tokens.begin(), tokens.end());
    }
  }
}

SemanticMetadata extract_rule_based(const Ad& ad, const Taxonomy& taxonomy,
                                    const ExtractorConfig& config) {
  if (taxonomy.empty()) throw Error(ErrorCode::kInvalidArgument, "taxonomy is empty");
  validate(config);

  StringSet text_tokens = tokenize(ad.title);
  for (const std::string* field : {&ad.description, &ad.landing_page_text}) {
    auto t = tokenize(*field);
    text_tokens.insert(t.begin(), t.end());
  }
  const StringSet title_tokens = tokenize(ad.title);

  SemanticMetadata meta;
  meta.ad_id = ad.ad_id;

  std::map<std::string, double> scores;
  StringSet matched;
  for (const auto& category : taxonomy.categories()) {
    std::size_t hits = 0;
    for (const auto& kw : category.keywords) {
      if (text_tokens.contains(kw)) {
        ++hits;
        matched.insert(kw);
      }
    }
    if (hits > 0) {
      scores.emplace(category.label,
                     static_cast<double>(hits) / static_cast<double>(category.keywords.size()));
    }
  }
  meta.categories = truncate_categories(scores, config.max_categories);
  meta.low_coverage = meta.categories.empty();

  if (auto brand = trim(ad.advertiser_id); !brand.empty()) {
    std::string b(brand);
    std::transform(b.begin(), b.end(), b.begin(), [](unsigned char c) { return std::tolower(c); });
    meta.brand_attrs.insert(std::move(b));
  }
  for (const auto& kw : matched) {
    if (title_tokens.contains(kw)) {
      meta.product_attrs.insert(kw);
    } else {
      meta.contextual_attrs.insert(kw);
    }
  }
  fill_text_sets(ad, config.phrase_n_max, meta);
  return meta;
}

std::vector<SemanticMetadata> extract_rule_based(const AdCatalog& catalog, const Taxonomy& taxonomy,
                                                 const ExtractorConfig& config) {
  std::vector<SemanticMetadata> out;
  out.reserve(catalog.size());
  for (const auto& ad : catalog.ads()) out.push_back(extract_rule_based(ad, taxonomy, config));
  return out;
}

// --- cache file ------------------------------------------------------------

namespace {

std::vector<std::string> as_list(const StringSet& s) { return {s.begin(), s.end()}; }

StringSet string_set(const json& rec, const char* key) {
  StringSet out;
  auto it = rec.find(key);
  if (it == rec.end()) return out;
  if (!it->is_array()) throw Error(ErrorCode::kParse, std::string("metadata field ") + key + ": expected array");
  for (const auto& v : *it) {
    if (!v.is_string()) throw Error(ErrorCode::kParse, std::string("metadata field ") + key + ": expected strings");
    out.insert(v.get<std::string>());
  }
  return out;
}

}  // namespace

std::string metadata_to_json_line(const SemanticMetadata& meta) {
  json rec = json::object();
  rec["ad_id"] = meta.ad_id;
  json cats = json::object();
  for (const auto& [label, score] : meta.categories) cats[label] = score;
  rec["categories"] = std::move(cats);
  rec["brand"] = as_list(meta.brand_attrs);
  rec["product"] = as_list(meta.product_attrs);
  rec["contextual"] = as_list(meta.contextual_attrs);
  rec["phrases"] = as_list(meta.phrases);
  rec["tokens"] = as_list(meta.tokens);
  rec["caption"] = meta.caption;
  rec["low_coverage"] = meta.low_coverage;
  return rec.dump();
}

SemanticMetadata metadata_from_json_line(const std::string& line) {
  json rec;
  try {
    rec = json::parse(line);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kParse, std::string("invalid metadata JSON: ") + e.what());
  }
  if (!rec.is_object() || !rec.contains("ad_id") || !rec["ad_id"].is_string()) {
    throw Error(ErrorCode::kParse, "metadata record needs a string ad_id");
  }
  SemanticMetadata meta;
  meta.ad_id = rec["ad_id"].get<std::string>();
  if (auto it = rec.find("categories"); it != rec.end()) {
    if (!it->is_object()) throw Error(ErrorCode::kParse, "metadata field categories: expected object");
    for (auto c = it->begin(); c != it->end(); ++c) {
      if (!c->is_number()) throw Error(ErrorCode::kParse, "metadata category score must be a number");
      const double score = c->get<double>();
      if (!(score > 0.0 && score <= 1.0)) {
        throw Error(ErrorCode::kParse, "metadata category score outside (0,1]: " + c.key());
      }
      meta.categories.emplace(c.key(), score);
    }
  }
  meta.brand_attrs = string_set(rec, "brand");
  meta.product_attrs = string_set(rec, "product");
  meta.contextual_attrs = string_set(rec, "contextual");
  meta.phrases = string_set(rec, "phrases");
  meta.tokens = string_set(rec, "tokens");
  if (auto it = rec.find("caption"); it != rec.end() && it->is_string()) meta.caption = it->get<std::string>();
  if (auto it = rec.find("low_coverage"); it != rec.end() && it->is_boolean()) meta.low_coverage = it->get<bool>();
  return meta;
}

void save_metadata(const std::vector<SemanticMetadata>& metadata, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write metadata file: " + path);
  for (const auto& m : metadata) out << metadata_to_json_line(m) << '\n';
  if (!out) throw Error(ErrorCode::kIo, "write failed: " + path);
}

std::vector<SemanticMetadata> load_metadata(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open metadata file: " + path);
  std::vector<SemanticMetadata> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      out.push_back(metadata_from_json_line(line));
    } catch (const Error& e) {
      throw Error(e.code(), path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace adsem
