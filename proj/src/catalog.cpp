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

#include "adsem/catalog.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "adsem/error.hpp"
#include "adsem/rng.hpp"
#include "json.hpp"

namespace adsem {

using json = nlohmann::json;

void validate_ad(const Ad& ad) {
  if (ad.ad_id.empty()) throw Error(ErrorCode::kInvalidArgument, "field ad_id: empty");
  if (trim(ad.title).empty()) {
    throw Error(ErrorCode::kInvalidArgument, "field title: empty after trimming (ad " + ad.ad_id + ")");
  }
  if (!(ad.true_conversion_rate >= 0.0 && ad.true_conversion_rate <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "field true_conversion_rate: outside [0,1] (ad " + ad.ad_id + ")");
  }
  if (!(ad.base_revenue_per_conversion >= 0.0) || !std::isfinite(ad.base_revenue_per_conversion)) {
    throw Error(ErrorCode::kInvalidArgument,
                "field base_revenue_per_conversion: negative (ad " + ad.ad_id + ")");
  }
}

std::string_view to_string(Perturbation p) {
  switch (p) {
    case Perturbation::kIdOnly: return "ID_ONLY";
    case Perturbation::kTokenAppend: return "TOKEN_APPEND";
    case Perturbation::kSentenceReorder: return "SENTENCE_REORDER";
  }
  return "UNKNOWN";
}

Perturbation parse_perturbation(std::string_view tag) {
  for (auto p : {Perturbation::kIdOnly, Perturbation::kTokenAppend, Perturbation::kSentenceReorder}) {
    if (tag == to_string(p)) return p;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown perturbation tag: " + std::string(tag));
}

std::string rotate_sentences(std::string_view text) {
  auto sentences = split_sentences(text);
  // An unterminated tail would fuse with whatever follows it, so it stays last.
  auto end = sentences.end();
  if (!sentences.empty() && std::string_view(".!?").find(sentences.back().back()) == std::string_view::npos) --end;
  if (end - sentences.begin() < 2) return std::string(text);
  std::rotate(sentences.begin(), sentences.begin() + 1, end);
  std::string out;
  for (const auto& s : sentences) {
    if (!out.empty()) out += ' ';
    out += s;
  }
  return out;
}

std::pair<Ad, ShadowPair> make_shadow(const Ad& ad, Perturbation perturbation, std::uint64_t seed) {
  Ad shadow = ad;
  shadow.ad_id = ad.ad_id + "__shadow" + std::string(to_string(perturbation));
  switch (perturbation) {
    case Perturbation::kIdOnly:
      break;
    case Perturbation::kTokenAppend: {
      char code[16];
      std::snprintf(code, sizeof code, "cmp%06llx",
                    static_cast<unsigned long long>(splitmix64(seed ^ fnv1a64(ad.ad_id)) & 0xffffffULL));
      shadow.title += ' ';
      shadow.title += code;
      break;
    }
    case Perturbation::kSentenceReorder:
      shadow.description = rotate_sentences(ad.description);
      break;
  }
  ShadowPair pair{ad.ad_id, shadow.ad_id, perturbation, seed};
  return {std::move(shadow), std::move(pair)};
}

void AdCatalog::add(Ad ad) {
  validate_ad(ad);
  if (by_id_.contains(ad.ad_id)) {
    throw Error(ErrorCode::kDuplicate, "duplicate ad_id: " + ad.ad_id);
  }
  by_id_.emplace(ad.ad_id, ads_.size());
  ads_.push_back(std::move(ad));
}

const ShadowPair& AdCatalog::add_shadow(std::string_view primary_id, Perturbation perturbation,
                                        std::uint64_t seed) {
  auto [shadow, pair] = make_shadow(at(primary_id), perturbation, seed);
  add(std::move(shadow));
  add_pair(std::move(pair));
  return pairs_.back();
}

void AdCatalog::add_pair(ShadowPair pair) {
  if (pair.primary_id == pair.shadow_id) {
    throw Error(ErrorCode::kInvalidArgument, "pair primary and shadow are the same ad: " + pair.primary_id);
  }
  const Ad& primary = at(pair.primary_id);
  const Ad& shadow = at(pair.shadow_id);
  if (shadow.latent_topics != primary.latent_topics ||
      shadow.true_conversion_rate != primary.true_conversion_rate ||
      shadow.base_revenue_per_conversion != primary.base_revenue_per_conversion) {
    throw Error(ErrorCode::kInvalidArgument,
                "shadow " + pair.shadow_id + " does not copy the simulation fields of " + pair.primary_id);
  }
  if (shadow_to_pair_.contains(pair.shadow_id)) {
    throw Error(ErrorCode::kDuplicate, "ad is already the shadow of another pair: " + pair.shadow_id);
  }
  shadow_to_pair_.emplace(pair.shadow_id, pairs_.size());
  pairs_.push_back(std::move(pair));
}

const Ad* AdCatalog::find(std::string_view ad_id) const {
  auto it = by_id_.find(std::string(ad_id));
  return it == by_id_.end() ? nullptr : &ads_[it->second];
}

const Ad& AdCatalog::at(std::string_view ad_id) const {
  if (const Ad* ad = find(ad_id)) return *ad;
  throw Error(ErrorCode::kNotFound, "ad not in catalog: " + std::string(ad_id));
}

bool AdCatalog::is_shadow(std::string_view ad_id) const {
  return shadow_to_pair_.contains(std::string(ad_id));
}

std::vector<const Ad*> AdCatalog::primaries() const {
  std::vector<const Ad*> out;
  for (const auto& ad : ads_) {
    if (!is_shadow(ad.ad_id)) out.push_back(&ad);
  }
  return out;
}

// --- persistence -----------------------------------------------------------

namespace {

const std::set<std::string, std::less<>> kKnownKeys{
    "ad_id", "title", "description", "landing_page_text", "advertiser_id", "latent_topics",
    "true_conversion_rate", "base_revenue_per_conversion", "shadow_of", "perturbation",
    "created_seed"};

[[noreturn]] void record_error(int line, std::string_view field, std::string_view what) {
  throw Error(ErrorCode::kParse, "line " + std::to_string(line) + ": field " + std::string(field) +
                                     ": " + std::string(what));
}

std::string string_field(const json& rec, const char* key, int line, bool required) {
  auto it = rec.find(key);
  if (it == rec.end() || it->is_null()) {
    if (required) record_error(line, key, "missing");
    return {};
  }
  if (!it->is_string()) record_error(line, key, "expected string");
  return it->get<std::string>();
}

double number_field(const json& rec, const char* key, int line) {
  auto it = rec.find(key);
  if (it == rec.end()) record_error(line, key, "missing");
  if (!it->is_number()) record_error(line, key, "expected number");
  return it->get<double>();
}

struct PendingPair {
  int line;
  ShadowPair pair;
};

}  // namespace

AdCatalog parse_catalog(std::string_view text, CatalogLoadReport* report) {
  AdCatalog catalog;
  std::vector<PendingPair> pending;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::parse_error& e) {
      record_error(line_no, "<record>", std::string("invalid JSON: ") + e.what());
    }
    if (!rec.is_object()) record_error(line_no, "<record>", "expected JSON object");

    Ad ad;
    ad.ad_id = string_field(rec, "ad_id", line_no, true);
    ad.title = string_field(rec, "title", line_no, true);
    ad.description = string_field(rec, "description", line_no, true);
    ad.landing_page_text = string_field(rec, "landing_page_text", line_no, false);
    ad.advertiser_id = string_field(rec, "advertiser_id", line_no, true);
    auto topics = rec.find("latent_topics");
    if (topics == rec.end()) record_error(line_no, "latent_topics", "missing");
    if (!topics->is_array()) record_error(line_no, "latent_topics", "expected array of strings");
    for (const auto& t : *topics) {
      if (!t.is_string()) record_error(line_no, "latent_topics", "expected array of strings");
      ad.latent_topics.insert(t.get<std::string>());
    }
    ad.true_conversion_rate = number_field(rec, "true_conversion_rate", line_no);
    ad.base_revenue_per_conversion = number_field(rec, "base_revenue_per_conversion", line_no);

    for (auto it = rec.begin(); it != rec.end(); ++it) {
      if (!kKnownKeys.contains(it.key()) && report) {
        report->warnings.push_back("line " + std::to_string(line_no) + ": unknown key '" + it.key() +
                                   "' ignored");
      }
    }

    if (rec.contains("shadow_of")) {
      ShadowPair pair;
      pair.primary_id = string_field(rec, "shadow_of", line_no, true);
      pair.shadow_id = ad.ad_id;
      try {
        pair.perturbation = parse_perturbation(string_field(rec, "perturbation", line_no, true));
      } catch (const Error& e) {
        if (e.code() == ErrorCode::kParse) throw;
        record_error(line_no, "perturbation", e.what());
      }
      auto seed = rec.find("created_seed");
      if (seed != rec.end()) {
        if (!seed->is_number_unsigned()) record_error(line_no, "created_seed", "expected unsigned integer");
        pair.created_seed = seed->get<std::uint64_t>();
      }
      pending.push_back({line_no, std::move(pair)});
    }

    try {
      catalog.add(std::move(ad));
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kDuplicate) {
        throw Error(ErrorCode::kDuplicate, "line " + std::to_string(line_no) + ": field ad_id: " + e.what());
      }
      throw Error(ErrorCode::kParse, "line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  for (auto& p : pending) {
    try {
      catalog.add_pair(std::move(p.pair));
    } catch (const Error& e) {
      record_error(p.line, "shadow_of", e.what());
    }
  }
  return catalog;
}

AdCatalog load_catalog(const std::string& path, CatalogLoadReport* report) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open catalog file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_catalog(buf.str(), report);
}

std::string serialize_catalog(const AdCatalog& catalog) {
  std::unordered_map<std::string, const ShadowPair*> pair_of_shadow;
  for (const auto& p : catalog.pairs()) pair_of_shadow.emplace(p.shadow_id, &p);

  std::string out;
  for (const auto& ad : catalog.ads()) {
    json rec = json::object();
    rec["ad_id"] = ad.ad_id;
    rec["title"] = ad.title;
    rec["description"] = ad.description;
    rec["landing_page_text"] = ad.landing_page_text;
    rec["advertiser_id"] = ad.advertiser_id;
    rec["latent_topics"] = std::vector<std::string>(ad.latent_topics.begin(), ad.latent_topics.end());
    rec["true_conversion_rate"] = ad.true_conversion_rate;
    rec["base_revenue_per_conversion"] = ad.base_revenue_per_conversion;
    if (auto it = pair_of_shadow.find(ad.ad_id); it != pair_of_shadow.end()) {
      rec["shadow_of"] = it->second->primary_id;
      rec["perturbation"] = std::string(to_string(it->second->perturbation));
      rec["created_seed"] = it->second->created_seed;
    }
    out += rec.dump();
    out += '\n';
  }
  return out;
}

void save_catalog(const AdCatalog& catalog, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write catalog file: " + path);
  out << serialize_catalog(catalog);
  if (!out) throw Error(ErrorCode::kIo, "write failed: " + path);
}

// --- synthetic generation --------------------------------------------------

namespace {

constexpr const char* kAdjectives[] = {"premium", "durable",    "lightweight", "classic",
                                       "modern",  "affordable", "bestselling", "handmade",
                                       "compact", "stylish",    "reliable",    "essential"};
constexpr const char* kFillers[] = {"everyday", "weekend",   "mornings", "adventures", "routine",
                                    "season",   "lifestyle", "upgrade",  "comfort",    "budget"};

template <std::size_t N>
const char* pick(Rng& rng, const char* const (&pool)[N]) {
  return pool[rng.below(N)];
}

const std::string& pick(Rng& rng, const std::vector<std::string>& pool) {
  return pool[rng.below(pool.size())];
}

std::string capitalize_first(std::string s) {
  if (!s.empty()) s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
  return s;
}

std::string description_sentence(Rng& rng, const Category& c) {
  const std::string& k1 = pick(rng, c.keywords);
  const std::string& k2 = pick(rng, c.keywords);
  const char* adj = pick(rng, kAdjectives);
  const char* filler = pick(rng, kFillers);
  std::string s;
  switch (rng.below(6)) {
    case 0: s = std::string(adj) + " " + k1 + " and " + k2 + " for your " + filler + "."; break;
    case 1: s = "discover " + k1 + " built for " + filler + "!"; break;
    case 2: s = "looking for " + std::string(adj) + " " + k1 + "?"; break;
    case 3: s = "shop " + k1 + " and " + k2 + " at great prices."; break;
    case 4: s = "our " + k1 + " pairs well with " + k2 + "."; break;
    default: s = "upgrade your " + std::string(filler) + " with " + adj + " " + k2 + "."; break;
  }
  return capitalize_first(std::move(s));
}

}  // namespace

AdCatalog generate_synthetic_catalog(const GeneratorConfig& config, std::uint64_t seed) {
  if (config.topics <= 0) throw Error(ErrorCode::kInvalidArgument, "topic count must be positive");
  if (!(config.shadow_fraction >= 0.0 && config.shadow_fraction <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "shadow fraction must lie in [0,1]");
  }
  if (!(config.noise_sentence_prob >= 0.0 && config.noise_sentence_prob <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "noise_sentence_prob must lie in [0,1]");
  }
  if (config.ads < 0) throw Error(ErrorCode::kInvalidArgument, "ad count must be nonnegative");
  if (config.min_topics_per_ad < 1 || config.max_topics_per_ad < config.min_topics_per_ad ||
      config.max_topics_per_ad > config.topics) {
    throw Error(ErrorCode::kInvalidArgument, "topics-per-ad range must satisfy 1 <= min <= max <= topics");
  }
  if (config.advertisers_per_topic < 1) {
    throw Error(ErrorCode::kInvalidArgument, "advertisers_per_topic must be positive");
  }
  if (config.shadow_fraction > 0.0 && config.perturbations.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "no perturbation tags configured");
  }

  const Taxonomy taxonomy = Taxonomy::with_topics(config.topics);
  const auto& cats = taxonomy.categories();
  const int topic_count = static_cast<int>(cats.size());

  AdCatalog catalog;
  Rng rng(derive_seed(seed, 0));
  std::vector<int> order(topic_count);
  for (int i = 0; i < config.ads; ++i) {
    Ad ad;
    char id[32];
    std::snprintf(id, sizeof id, "ad%06d", i);
    ad.ad_id = id;

    const int n_topics = static_cast<int>(rng.between(config.min_topics_per_ad, config.max_topics_per_ad));
    std::iota(order.begin(), order.end(), 0);
    for (int t = 0; t < n_topics; ++t) {
      std::swap(order[t], order[t + rng.below(topic_count - t)]);
    }
    std::vector<const Category*> topics;
    for (int t = 0; t < n_topics; ++t) {
      topics.push_back(&cats[order[t]]);
      ad.latent_topics.insert(cats[order[t]].label);
    }

    std::vector<std::string> title_words;
    if (rng.bernoulli(0.5)) title_words.emplace_back(pick(rng, kAdjectives));
    for (const Category* c : topics) {
      const int n_kw = static_cast<int>(rng.between(1, 2));
      std::vector<std::string> pool = c->keywords;
      for (int k = 0; k < n_kw; ++k) {
        std::swap(pool[k], pool[k + rng.below(pool.size() - k)]);
        title_words.push_back(pool[k]);
      }
    }
    for (auto& w : title_words) {
      if (rng.bernoulli(0.5)) w = capitalize_first(std::move(w));
      if (!ad.title.empty()) ad.title += ' ';
      ad.title += w;
    }

    const int n_sentences = static_cast<int>(rng.between(2, 4));
    for (int s = 0; s < n_sentences; ++s) {
      if (!ad.description.empty()) ad.description += ' ';
      ad.description += description_sentence(rng, *topics[rng.below(topics.size())]);
    }
    if (topic_count > n_topics && rng.bernoulli(config.noise_sentence_prob)) {
      const int other = order[n_topics + rng.below(topic_count - n_topics)];
      ad.description += " Also check out " + pick(rng, cats[other].keywords) + ".";
    }
    if (rng.bernoulli(0.7)) {
      const Category& c = *topics[rng.below(topics.size())];
      ad.landing_page_text = "Free shipping on " + std::string(pick(rng, kAdjectives)) + " " +
                             pick(rng, c.keywords) + " and " + pick(rng, c.keywords) + " this " +
                             pick(rng, kFillers) + ".";
    }

    char adv[48];
    std::snprintf(adv, sizeof adv, "adv-%s-%d", topics.front()->label.c_str(),
                  static_cast<int>(rng.below(config.advertisers_per_topic)));
    ad.advertiser_id = adv;
    ad.true_conversion_rate = std::round((0.02 + 0.06 * rng.uniform01()) * 1e4) / 1e4;
    ad.base_revenue_per_conversion = std::round((5.0 + 45.0 * rng.uniform01()) * 100.0) / 100.0;
    catalog.add(std::move(ad));
  }

  const auto n_shadows = static_cast<std::size_t>(std::llround(config.shadow_fraction * config.ads));
  if (n_shadows > 0) {
    Rng pick_rng(derive_seed(seed, 1));
    std::vector<std::size_t> idx(static_cast<std::size_t>(config.ads));
    std::iota(idx.begin(), idx.end(), 0);
    for (std::size_t t = 0; t < n_shadows; ++t) {
      std::swap(idx[t], idx[t + pick_rng.below(idx.size() - t)]);
    }
    idx.resize(n_shadows);
    std::sort(idx.begin(), idx.end());
    for (std::size_t p = 0; p < idx.size(); ++p) {
      const std::string primary = catalog.ads()[idx[p]].ad_id;
      const Perturbation tag = config.perturbations[p % config.perturbations.size()];
      catalog.add_shadow(primary, tag, derive_seed(seed, 1000000 + p));
    }
  }
  return catalog;
}

}  // namespace adsem
