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

#include "adsem/llm_client.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <fstream>
#include <sstream>
#include <thread>

#include "adsem/error.hpp"
#include "httplib.h"
#include "json.hpp"

namespace adsem {

using json = nlohmann::json;

namespace {

constexpr std::string_view kDefaultTemplate =
    "Extract retrieval metadata for this ad as JSON with keys categories (label, score), "
    "brand, product, contextual and caption.\nTitle: {{title}}\nDescription: {{description}}\n";

void replace_all(std::string& s, std::string_view from, std::string_view to) {
  for (std::size_t pos = s.find(from); pos != std::string::npos; pos = s.find(from, pos + to.size())) {
    s.replace(pos, from.size(), to);
  }
}

std::string load_template(const ExtractorConfig& config) {
  if (config.prompt_template_path.empty()) return std::string(kDefaultTemplate);
  std::ifstream in(config.prompt_template_path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open prompt template: " + config.prompt_template_path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

struct Endpoint {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

Endpoint split_url(const std::string& url) {
  const auto scheme = url.find("://");
  if (scheme == std::string::npos) throw Error(ErrorCode::kInvalidArgument, "endpoint_url needs a scheme: " + url);
  const auto slash = url.find('/', scheme + 3);
  if (slash == std::string::npos) return {url, "/"};
  return {url.substr(0, slash), url.substr(slash)};
}

StringSet attr_set(const json& obj, const char* key) {
  StringSet out;
  auto it = obj.find(key);
  if (it == obj.end()) return out;
  if (!it->is_array()) throw Error(ErrorCode::kParse, std::string(key) + ": expected array");
  for (const auto& v : *it) {
    if (!v.is_string()) throw Error(ErrorCode::kParse, std::string(key) + ": expected strings");
    std::string s(trim(v.get<std::string>()));
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    if (!s.empty()) out.insert(std::move(s));
  }
  return out;
}

using SliceResult = std::vector<std::optional<std::string>>;

// One POST for the ads at `indices`. Missing or non-object entries come back empty.
SliceResult post_slice(const Endpoint& endpoint, const std::string& url, const std::vector<Ad>& ads,
                       const std::vector<std::size_t>& indices, const std::string& prompt_template,
                       const ExtractorConfig& config) {
  json body = json::object();
  json prompts = json::array();
  for (std::size_t i : indices) {
    prompts.push_back({{"ad_id", ads[i].ad_id}, {"prompt", render_prompt(prompt_template, ads[i])}});
  }
  body["prompts"] = std::move(prompts);

  httplib::Client client(endpoint.origin);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(config.timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(config.timeout - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_write_timeout(secs.count(), usecs.count());

  auto res = client.Post(endpoint.path, body.dump(), "application/json");
  if (!res) {
    const auto err = res.error();
    if (err == httplib::Error::Read || err == httplib::Error::ConnectionTimeout) {
      throw Error(ErrorCode::kTimeout, "LLM endpoint timed out: " + url);
    }
    throw Error(ErrorCode::kUnavailable,
                "LLM endpoint unreachable: " + url + " (" + httplib::to_string(err) + ")");
  }
  if (res->status >= 500 || res->status == 404) {
    throw Error(ErrorCode::kUnavailable,
                "LLM endpoint " + url + " answered HTTP " + std::to_string(res->status));
  }

  SliceResult out(indices.size());
  if (res->status != 200) return out;
  json parsed = json::parse(res->body, nullptr, false);
  if (parsed.is_discarded() || !parsed.is_object() || !parsed.contains("results") ||
      !parsed["results"].is_array()) {
    return out;
  }
  const auto& results = parsed["results"];
  for (std::size_t i = 0; i < indices.size() && i < results.size(); ++i) {
    if (results[i].is_object()) out[i] = results[i].dump();
  }
  return out;
}

// Runs every slice with at most max_in_flight in flight; results are indexed
// by slice. The first failing slice (in slice order) is rethrown.
std::vector<SliceResult> run_slices(const std::vector<std::vector<std::size_t>>& slices,
                                    const std::vector<Ad>& ads, const std::string& prompt_template,
                                    const ExtractorConfig& config) {
  const Endpoint endpoint = split_url(config.endpoint_url);
  std::vector<SliceResult> results(slices.size());
  std::vector<std::exception_ptr> errors(slices.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t s = next++; s < slices.size(); s = next++) {
      try {
        results[s] = post_slice(endpoint, config.endpoint_url, ads, slices[s], prompt_template, config);
      } catch (...) {
        errors[s] = std::current_exception();
      }
    }
  };
  const std::size_t n_workers = std::min<std::size_t>(slices.size(), config.max_in_flight);
  std::vector<std::jthread> workers;
  for (std::size_t w = 0; w < n_workers; ++w) workers.emplace_back(worker);
  workers.clear();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

std::vector<std::vector<std::size_t>> make_slices(const std::vector<std::size_t>& indices, int batch_size) {
  std::vector<std::vector<std::size_t>> slices;
  for (std::size_t i = 0; i < indices.size(); i += batch_size) {
    slices.emplace_back(indices.begin() + i,
                        indices.begin() + std::min(indices.size(), i + static_cast<std::size_t>(batch_size)));
  }
  return slices;
}

}  // namespace

std::string render_prompt(std::string_view prompt_template, const Ad& ad) {
  std::string out(prompt_template);
  replace_all(out, "{{title}}", ad.title);
  replace_all(out, "{{description}}", ad.description);
  replace_all(out, "{{landing_page_text}}", ad.landing_page_text);
  replace_all(out, "{{ad_id}}", ad.ad_id);
  return out;
}

SemanticMetadata parse_llm_result(const std::string& result_json, const Ad& ad,
                                  const ExtractorConfig& config, std::vector<std::string>& warnings) {
  json obj = json::parse(result_json, nullptr, false);
  if (obj.is_discarded() || !obj.is_object()) throw Error(ErrorCode::kParse, "result is not a JSON object");
  auto cats = obj.find("categories");
  if (cats == obj.end() || !cats->is_array()) throw Error(ErrorCode::kParse, "categories: expected array");

  SemanticMetadata meta;
  meta.ad_id = ad.ad_id;
  std::map<std::string, double> scores;
  for (const auto& c : *cats) {
    if (!c.is_object() || !c.contains("label") || !c["label"].is_string() || !c.contains("score") ||
        !c["score"].is_number()) {
      throw Error(ErrorCode::kParse, "categories: entries need a string label and a numeric score");
    }
    const std::string label(trim(c["label"].get<std::string>()));
    double score = c["score"].get<double>();
    if (label.empty()) throw Error(ErrorCode::kParse, "categories: empty label");
    if (!(score > 0.0)) {
      warnings.push_back(ad.ad_id + ": dropped category '" + label + "' with non-positive score");
      continue;
    }
    if (score > 1.0) {
      warnings.push_back(ad.ad_id + ": clamped score of '" + label + "' from " + std::to_string(score) + " to 1");
      score = 1.0;
    }
    auto [it, inserted] = scores.emplace(label, score);
    if (!inserted) it->second = std::max(it->second, score);
  }
  meta.categories = truncate_categories(scores, config.max_categories);
  meta.low_coverage = meta.categories.empty();
  meta.brand_attrs = attr_set(obj, "brand");
  meta.product_attrs = attr_set(obj, "product");
  meta.contextual_attrs = attr_set(obj, "contextual");
  if (auto it = obj.find("caption"); it != obj.end()) {
    if (!it->is_string()) throw Error(ErrorCode::kParse, "caption: expected string");
    meta.caption = it->get<std::string>();
  }
  fill_text_sets(ad, config.phrase_n_max, meta);
  return meta;
}

std::vector<LlmOutcome> extract_llm(const std::vector<Ad>& batch, const ExtractorConfig& config) {
  if (config.mode != ExtractorMode::kLlmEndpoint) {
    throw Error(ErrorCode::kInvalidArgument, "extract_llm requires LLM_ENDPOINT mode");
  }
  validate(config);
  const std::string prompt_template = load_template(config);

  std::vector<LlmOutcome> outcomes(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) outcomes[i].ad_id = batch[i].ad_id;

  std::vector<std::size_t> pending(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) pending[i] = i;

  for (int attempt = 0; attempt < 2 && !pending.empty(); ++attempt) {
    const auto slices = make_slices(pending, config.batch_size);
    const auto results = run_slices(slices, batch, prompt_template, config);
    std::vector<std::size_t> failed;
    for (std::size_t s = 0; s < slices.size(); ++s) {
      for (std::size_t k = 0; k < slices[s].size(); ++k) {
        const std::size_t idx = slices[s][k];
        LlmOutcome& out = outcomes[idx];
        if (!results[s][k]) {
          out.error = "missing or malformed result";
          failed.push_back(idx);
          continue;
        }
        std::vector<std::string> warnings;
        try {
          out.metadata = parse_llm_result(*results[s][k], batch[idx], config, warnings);
          out.error.clear();
          out.warnings = std::move(warnings);
        } catch (const Error& e) {
          out.error = e.what();
          failed.push_back(idx);
        }
      }
    }
    std::sort(failed.begin(), failed.end());
    pending = std::move(failed);
  }
  for (std::size_t idx : pending) {
    outcomes[idx].error = "schema validation failed after retry: " + outcomes[idx].error;
  }
  return outcomes;
}

}  // namespace adsem
