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

#include "adsem/catalog.hpp"
#include "adsem/error.hpp"
#include "adsem/rng.hpp"
#include "adsem/simulator.hpp"
#include "adsem/taxonomy.hpp"
#include "support.hpp"

using namespace adsem;
using adsem::testing::make_ad;

namespace {

AdCatalog pair_catalog() {
  AdCatalog c;
  Ad p = make_ad("P", "Trail shoes");
  p.true_conversion_rate = 0.3;
  p.base_revenue_per_conversion = 2.0;
  c.add(p);
  c.add(make_ad("Q", "Road bikes"));
  c.add_shadow("P", Perturbation::kIdOnly, 1);
  return c;
}

Retriever fixed(std::vector<std::string> list) {
  Retriever r;
  r.top_k = [list](std::string_view, int k) {
    return std::vector<std::string>(list.begin(), list.begin() + std::min<std::size_t>(list.size(), k));
  };
  r.knows = [](std::string_view) { return true; };
  return r;
}

}  // namespace

TEST_CASE("zero requests give all-zero stats", "[simulator]") {
  SimulationConfig config;
  config.days = 3;
  config.requests_per_day = 0;
  const auto r = simulate_delivery(pair_catalog(), fixed({"P", "P__shadowID_ONLY"}), config);
  REQUIRE(r.pairs.size() == 1);
  CHECK(r.pairs[0].days.size() == 3);
  CHECK(r.pairs[0].totals() == DayRecord{});
  CHECK(r.topline_impressions == std::vector<std::int64_t>{0, 0, 0});
}

TEST_CASE("one request with one listed ad", "[simulator]") {
  SimulationConfig config;
  config.days = 1;
  config.requests_per_day = 1;
  config.request_seeds = {"Q"};
  const auto r = simulate_delivery(pair_catalog(), fixed({"P"}), config);
  CHECK(r.pairs[0].days[0].impressions_p == 1);
  CHECK(r.pairs[0].days[0].impressions_s == 0);
  CHECK(r.topline_impressions[0] == 1);
}

TEST_CASE("conversions follow the replayed random stream", "[simulator]") {
  SimulationConfig config;
  config.days = 4;
  config.requests_per_day = 300;
  config.seed = 77;
  config.request_seeds = {"Q"};
  const auto r = simulate_delivery(pair_catalog(), fixed({"P", "P__shadowID_ONLY"}), config);
  for (int d = 0; d < config.days; ++d) {
    Rng rng(derive_seed(77, static_cast<std::uint64_t>(d)));
    DayRecord want;
    for (int i = 0; i < 300; ++i) {
      rng.below(1);
      const bool cp = rng.bernoulli(0.3);
      const bool cs = rng.bernoulli(0.3);
      ++want.impressions_p;
      ++want.impressions_s;
      want.conversions_p += cp;
      want.conversions_s += cs;
      want.revenue_p += cp ? 2.0 : 0.0;
      want.revenue_s += cs ? 2.0 : 0.0;
    }
    CHECK(r.pairs[0].days[d] == want);
    CHECK(r.topline_revenue[d] == want.revenue_p + want.revenue_s);
  }
}

TEST_CASE("simulation is deterministic and thread-count independent", "[simulator][property]") {
  const AdCatalog catalog = generate_synthetic_catalog({.ads = 200}, 2);
  const Engine engine(build_engine_state(extract_rule_based(catalog, Taxonomy::with_topics(20)), {}, &catalog));
  SimulationConfig config;
  config.days = 5;
  config.requests_per_day = 200;
  config.k = 20;
  config.threads = 1;
  for (auto tag : {RetrieverTag::kSemantic, RetrieverTag::kBaseline}) {
    const auto retriever = make_retriever(engine, tag);
    const auto a = simulate_delivery(catalog, retriever, config);
    config.threads = 4;
    const auto b = simulate_delivery(catalog, retriever, config);
    config.threads = 1;
    CHECK(a.pairs == b.pairs);
    CHECK(a.topline_revenue == b.topline_revenue);
    config.seed = 2;
    const auto c = simulate_delivery(catalog, retriever, config);
    config.seed = 1;
    CHECK_FALSE(a.topline_revenue == c.topline_revenue);

    // Every request shows min(k, list size) ads.
    for (int d = 0; d < config.days; ++d) {
      CHECK(a.topline_impressions[d] > 0);
      CHECK(a.topline_impressions[d] <= 200 * 20);
      for (const auto& p : a.pairs) {
        CHECK(p.days[d].conversions_p <= p.days[d].impressions_p);
        CHECK(p.days[d].conversions_s <= p.days[d].impressions_s);
      }
    }
  }
}

TEST_CASE("simulator rejects bad input", "[simulator]") {
  SimulationConfig config;
  config.days = 0;
  CHECK_THROWS_AS(validate(config), Error);
  config = {};
  config.k = 0;
  CHECK_THROWS_AS(validate(config), Error);
  Retriever blind = fixed({});
  blind.knows = [](std::string_view id) { return id != "P__shadowID_ONLY"; };
  CHECK_THROWS_MATCHES(simulate_delivery(pair_catalog(), blind, {}), Error,
                       Catch::Matchers::Predicate<Error>([](const Error& e) { return e.code() == ErrorCode::kNotFound; }));
}
