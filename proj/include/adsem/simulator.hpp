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
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "adsem/catalog.hpp"
#include "adsem/engine.hpp"
#include "adsem/metrics.hpp"

namespace adsem {

struct SimulationConfig {
  int days = 14;
  int requests_per_day = 5000;
  std::uint64_t seed = 1;
  RetrieverTag retriever_tag = RetrieverTag::kSemantic;
  int k = 100;
  // Request model. Empty means uniform over the catalog's primary ads;
  // otherwise uniform over this list.
  std::vector<std::string> request_seeds;
  // Worker threads for per-day simulation; 0 picks the hardware count.
  int threads = 0;
};

void validate(const SimulationConfig& config);

// A top-k source the simulator can drive.
struct Retriever {
  RetrieverTag tag = RetrieverTag::kSemantic;
  std::function<std::vector<std::string>(std::string_view seed, int k)> top_k;
  std::function<bool(std::string_view ad_id)> knows;
};

Retriever make_retriever(const Engine& engine, RetrieverTag tag);

struct SimulationResult {
  std::vector<PairDeliveryStats> pairs;  // catalog pair order
  std::vector<double> topline_revenue;   // per day, all delivered ads
  std::vector<std::int64_t> topline_impressions;
};

// Deterministic delivery replay. Each day draws its requests from a generator
// seeded with derive_seed(config.seed, day); every returned ad gets one
// impression, and each impression converts with the ad's true rate.
// Throws kNotFound when a pair's ad is unknown to the retriever.
SimulationResult simulate_delivery(const AdCatalog& catalog, const Retriever& retriever,
                                   const SimulationConfig& config);

}  // namespace adsem
