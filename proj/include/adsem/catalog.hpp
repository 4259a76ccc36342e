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

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "adsem/taxonomy.hpp"
#include "adsem/text.hpp"

namespace adsem {

struct Ad {
  std::string ad_id;
  std::string title;
  std::string description;
  std::string landing_page_text;
  std::string advertiser_id;
  // Simulation-only ground truth; never read by the retrievers.
  StringSet latent_topics;
  double true_conversion_rate = 0.0;
  double base_revenue_per_conversion = 0.0;

  bool operator==(const Ad&) const = default;
};

// Throws kInvalidArgument naming the offending field.
void validate_ad(const Ad& ad);

enum class Perturbation {
  kIdOnly,           // new ad_id, identical text
  kTokenAppend,      // one neutral campaign-code token appended to the title
  kSentenceReorder,  // description sentences rotated left by one
};

std::string_view to_string(Perturbation p);
// Throws kInvalidArgument for an unknown tag.
Perturbation parse_perturbation(std::string_view tag);

struct ShadowPair {
  std::string primary_id;
  std::string shadow_id;
  Perturbation perturbation = Perturbation::kIdOnly;
  std::uint64_t created_seed = 0;

  bool operator==(const ShadowPair&) const = default;
};

// Builds the shadow copy of `ad`. Same inputs give byte-identical output.
std::pair<Ad, ShadowPair> make_shadow(const Ad& ad, Perturbation perturbation, std::uint64_t seed);

// Left rotation by one of the description's sentences, re-joined with single spaces.
std::string rotate_sentences(std::string_view text);

// Immutable after construction; safe to share across reader threads.
class AdCatalog {
 public:
  // Appends a validated ad. Throws kDuplicate for a repeated ad_id.
  void add(Ad ad);
  // Creates, stores and registers the shadow of an existing ad.
  const ShadowPair& add_shadow(std::string_view primary_id, Perturbation perturbation,
                               std::uint64_t seed);
  // Registers a pair whose two ads are already present.
  void add_pair(ShadowPair pair);

  const std::vector<Ad>& ads() const { return ads_; }
  const std::vector<ShadowPair>& pairs() const { return pairs_; }
  std::size_t size() const { return ads_.size(); }
  bool empty() const { return ads_.empty(); }

  const Ad* find(std::string_view ad_id) const;
  // Throws kNotFound.
  const Ad& at(std::string_view ad_id) const;
  bool is_shadow(std::string_view ad_id) const;
  // Ads that are not the shadow side of any pair, in record order.
  std::vector<const Ad*> primaries() const;

  bool operator==(const AdCatalog& other) const {
    return ads_ == other.ads_ && pairs_ == other.pairs_;
  }

 private:
  std::vector<Ad> ads_;
  std::vector<ShadowPair> pairs_;
  std::unordered_map<std::string, std::size_t> by_id_;
  std::unordered_map<std::string, std::size_t> shadow_to_pair_;
};

struct CatalogLoadReport {
  std::vector<std::string> warnings;
};

// Line-delimited JSON, one ad per line. Shadow ads carry the optional keys
// shadow_of, perturbation and created_seed, from which pairs are rebuilt.
AdCatalog load_catalog(const std::string& path, CatalogLoadReport* report = nullptr);
AdCatalog parse_catalog(std::string_view text, CatalogLoadReport* report = nullptr);
void save_catalog(const AdCatalog& catalog, const std::string& path);
std::string serialize_catalog(const AdCatalog& catalog);

struct GeneratorConfig {
  int ads = 1000;
  int topics = 20;
  int min_topics_per_ad = 1;
  int max_topics_per_ad = 2;
  double shadow_fraction = 0.1;
  int advertisers_per_topic = 6;
  // Probability that a description carries one off-topic keyword sentence.
  double noise_sentence_prob = 0.15;
  // Assigned round-robin over the shadow pairs.
  std::vector<Perturbation> perturbations{Perturbation::kIdOnly, Perturbation::kTokenAppend,
                                          Perturbation::kSentenceReorder};
};

AdCatalog generate_synthetic_catalog(const GeneratorConfig& config, std::uint64_t seed);

}  // namespace adsem
