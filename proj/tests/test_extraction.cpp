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

#include "catch_amalgamated.hpp"

#include <algorithm>
#include <iterator>

#include "adsem/catalog.hpp"
#include "adsem/error.hpp"
#include "adsem/extraction.hpp"
#include "adsem/taxonomy.hpp"
#include "support.hpp"

using namespace adsem;
using adsem::testing::make_ad;
using adsem::testing::TempDir;

namespace {

Taxonomy small_taxonomy() {
  return Taxonomy({{"footwear", {"shoes", "sneaker", "boot", "sandal"}},
                   {"outdoor", {"trail", "tent", "camping", "hiking"}},
                   {"sports", {"running", "ball", "racket", "gym"}}});
}

}  // namespace

TEST_CASE("category score is keyword coverage", "[extraction]") {
  const Taxonomy taxonomy({{"footwear", {"shoes", "sneaker", "boot", "sandal"}}});
  const auto meta = extract_rule_based(make_ad("a", "trail running shoes", ""), taxonomy);
  REQUIRE(meta.categories.size() == 1);
  CHECK(meta.categories.at("footwear") == 0.25);
  CHECK_FALSE(meta.low_coverage);

  const auto full = extract_rule_based(make_ad("b", "shoes sneaker boot sandal", ""), taxonomy);
  CHECK(full.categories.at("footwear") == 1.0);
}

TEST_CASE("no keyword overlap flags low coverage", "[extraction]") {
  const auto meta = extract_rule_based(make_ad("a", "quantum toaster", ""), small_taxonomy());
  CHECK(meta.categories.empty());
  CHECK(meta.low_coverage);
  CHECK_THROWS_AS(extract_rule_based(make_ad("a", "x", ""), Taxonomy{}), Error);
}

TEST_CASE("attributes split by title presence", "[extraction]") {
  const Ad ad = make_ad("a", "Trail Shoes", "Great for hiking and camping.", "ACME-Outdoor");
  const auto meta = extract_rule_based(ad, small_taxonomy());
  CHECK(meta.brand_attrs == StringSet{"acme-outdoor"});
  CHECK(meta.product_attrs == StringSet{"shoes", "trail"});
  CHECK(meta.contextual_attrs == StringSet{"camping", "hiking"});
  CHECK(meta.categories.at("outdoor") == 0.75);
  CHECK(meta.categories.at("footwear") == 0.25);
  // Tokens: text tokens plus attribute tokens ("acme", "outdoor").
  CHECK(meta.tokens == StringSet{"trail", "shoes", "great", "for", "hiking", "and", "camping", "acme", "outdoor"});
  CHECK(meta.phrases.contains("trail shoes"));
  CHECK(meta.phrases.contains("great hiking camping"));
}

TEST_CASE("categories truncate by score desc then label asc", "[extraction]") {
  const std::map<std::string, double> scores{{"d", 0.5}, {"c", 0.5}, {"b", 0.25}, {"a", 0.75}, {"e", 0.5}};
  CHECK(truncate_categories(scores, 3) == std::map<std::string, double>{{"a", 0.75}, {"c", 0.5}, {"d", 0.5}});
  CHECK(truncate_categories(scores, 10) == scores);

  ExtractorConfig config;
  config.max_categories = 1;
  const auto meta = extract_rule_based(make_ad("a", "trail tent running shoes", ""), small_taxonomy(), config);
  CHECK(meta.categories == std::map<std::string, double>{{"outdoor", 0.5}});
}

TEST_CASE("extractor config bounds", "[extraction]") {
  ExtractorConfig c;
  c.max_categories = 0;
  CHECK_THROWS_AS(validate(c), Error);
  c = {};
  c.batch_size = 0;
  CHECK_THROWS_AS(validate(c), Error);
  c = {};
  c.max_in_flight = 0;
  CHECK_THROWS_AS(validate(c), Error);
}

TEST_CASE("rule extraction is deterministic and bounded", "[extraction][property]") {
  const AdCatalog catalog = generate_synthetic_catalog({.ads = 300}, 5);
  const Taxonomy taxonomy = Taxonomy::with_topics(20);
  const auto a = extract_rule_based(catalog, taxonomy);
  const auto b = extract_rule_based(catalog, taxonomy);
  REQUIRE(a.size() == catalog.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(metadata_to_json_line(a[i]) == metadata_to_json_line(b[i]));
    CHECK(a[i].categories.size() <= 5);
    for (const auto& [label, score] : a[i].categories) {
      CHECK(score > 0.0);
      CHECK(score <= 1.0);
    }
    // Non-empty synthetic titles always carry a topic keyword.
    CHECK_FALSE(a[i].categories.empty());
  }
}

TEST_CASE("rule metadata is stable across every perturbation", "[extraction][property]") {
  const AdCatalog catalog = generate_synthetic_catalog({}, 11);
  const Taxonomy taxonomy = Taxonomy::with_topics(20);
  for (const auto& pair : catalog.pairs()) {
    const auto p = extract_rule_based(catalog.at(pair.primary_id), taxonomy);
    const auto s = extract_rule_based(catalog.at(pair.shadow_id), taxonomy);
    CHECK(p.categories == s.categories);
    CHECK(p.brand_attrs == s.brand_attrs);
    CHECK(p.product_attrs == s.product_attrs);
    CHECK(p.contextual_attrs == s.contextual_attrs);
    switch (pair.perturbation) {
      case Perturbation::kIdOnly:
        CHECK(p.tokens == s.tokens);
        CHECK(p.phrases == s.phrases);
        break;
      case Perturbation::kTokenAppend: {
        StringSet extra;
        std::set_difference(s.tokens.begin(), s.tokens.end(), p.tokens.begin(), p.tokens.end(),
                            std::inserter(extra, extra.end()));
        CHECK(extra.size() == 1);
        CHECK(std::includes(s.tokens.begin(), s.tokens.end(), p.tokens.begin(), p.tokens.end()));
        break;
      }
      case Perturbation::kSentenceReorder:
        CHECK(p.tokens == s.tokens);
        break;
    }
  }
}

TEST_CASE("metadata cache round trip", "[extraction]") {
  TempDir dir;
  const AdCatalog catalog = generate_synthetic_catalog({.ads = 50}, 2);
  auto metadata = extract_rule_based(catalog, Taxonomy::with_topics(20));
  metadata[0].caption = "A caption with \"quotes\" and \xC3\xA9";
  save_metadata(metadata, dir.file("m.jsonl"));
  CHECK(load_metadata(dir.file("m.jsonl")) == metadata);
  CHECK_THROWS_AS(metadata_from_json_line("{\"ad_id\": 3}"), Error);
}

TEST_CASE("taxonomy parsing", "[extraction][taxonomy]") {
  const Taxonomy t = Taxonomy::parse("# comment\nb/x\tk1 k2\n\na/y\tk3\n");
  REQUIRE(t.size() == 2);
  CHECK(t.categories()[0].label == "a/y");
  CHECK(t.categories()[1].keywords == std::vector<std::string>{"k1", "k2"});
  CHECK_THROWS_AS(Taxonomy::parse("a\tk\na\tk2\n"), Error);
  CHECK(Taxonomy::builtin().size() == 40);
  CHECK(Taxonomy::with_topics(20).size() == 20);
  CHECK(Taxonomy::with_topics(45).size() == 45);
}
