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

#include "adsem/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <thread>
#include <unordered_map>

#include "adsem/error.hpp"
#include "adsem/rng.hpp"

namespace adsem {

void validate(const SimulationConfig& config) {
  if (config.days < 1) throw Error(ErrorCode::kInvalidArgument, "days must be >= 1");
  if (config.requests_per_day < 0) throw Error(ErrorCode::kInvalidArgument, "requests_per_day must be >= 0");
  if (config.k < 1) throw Error(ErrorCode::kInvalidArgument, "k must be >= 1");
  if (config.threads < 0) throw Error(ErrorCode::kInvalidArgument, "threads must be >= 0");
}

Retriever make_retriever(const Engine& engine, RetrieverTag tag) {
  Retriever r;
  r.tag = tag;
  r.top_k = [&engine, tag](std::string_view seed, int k) { return engine.retrieve_with(tag, seed, k).ids(); };
  r.knows = [&engine, tag](std::string_view id) { return engine.knows(tag, id); };
  return r;
}

namespace {

struct PairSlot {
  std::int32_t pair = -1;
  bool shadow = false;
};

struct DayOutput {
  std::vector<DayRecord> pairs;
  double revenue = 0.0;
  std::int64_t impressions = 0;
};

}  // namespace

SimulationResult simulate_delivery(const AdCatalog& catalog, const Retriever& retriever,
                                   const SimulationConfig& config) {
  validate(config);
  const auto& ads = catalog.ads();
  std::unordered_map<std::string_view, std::size_t> ad_index;
  ad_index.reserve(ads.size());
  for (std::size_t i = 0; i < ads.size(); ++i) ad_index.emplace(ads[i].ad_id, i);

  const auto& pairs = catalog.pairs();
  std::vector<PairSlot> slots(ads.size());
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    for (const auto* id : {&pairs[p].primary_id, &pairs[p].shadow_id}) {
      if (!retriever.knows(*id)) {
        throw Error(ErrorCode::kNotFound, "pair ad missing from snapshot: " + *id);
      }
    }
    slots[ad_index.at(pairs[p].primary_id)] = {static_cast<std::int32_t>(p), false};
    slots[ad_index.at(pairs[p].shadow_id)] = {static_cast<std::int32_t>(p), true};
  }

  std::vector<std::string> seeds = config.request_seeds;
  if (seeds.empty()) {
    for (const Ad* ad : catalog.primaries()) seeds.push_back(ad->ad_id);
  }

  SimulationResult result;
  result.pairs.resize(pairs.size());
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    result.pairs[p].pair = pairs[p];
    result.pairs[p].days.assign(static_cast<std::size_t>(config.days), DayRecord{});
  }
  result.topline_revenue.assign(static_cast<std::size_t>(config.days), 0.0);
  result.topline_impressions.assign(static_cast<std::size_t>(config.days), 0);
  if (config.requests_per_day == 0 || seeds.empty()) return result;

  // Top-k lists are fixed per seed, so they are computed once.
  std::vector<std::vector<std::size_t>> lists(seeds.size());
  for (std::size_t s = 0; s < seeds.size(); ++s) {
    for (const auto& id : retriever.top_k(seeds[s], config.k)) {
      const auto it = ad_index.find(id);
      if (it == ad_index.end()) throw Error(ErrorCode::kNotFound, "retriever returned an ad outside the catalog: " + id);
      lists[s].push_back(it->second);
    }
  }

  const auto run_day = [&](int day) {
    DayOutput out;
    out.pairs.assign(pairs.size(), DayRecord{});
    Rng rng(derive_seed(config.seed, static_cast<std::uint64_t>(day)));
    for (int r = 0; r < config.requests_per_day; ++r) {
      const auto& list = lists[rng.below(seeds.size())];
      for (std::size_t a : list) {
        const Ad& ad = ads[a];
        const bool converted = rng.bernoulli(ad.true_conversion_rate);
        const double revenue = converted ? ad.base_revenue_per_conversion : 0.0;
        ++out.impressions;
        out.revenue += revenue;
        const PairSlot slot = slots[a];
        if (slot.pair < 0) continue;
        DayRecord& rec = out.pairs[static_cast<std::size_t>(slot.pair)];
        if (slot.shadow) {
          ++rec.impressions_s;
          rec.conversions_s += converted;
          rec.revenue_s += revenue;
        } else {
          ++rec.impressions_p;
          rec.conversions_p += converted;
          rec.revenue_p += revenue;
        }
      }
    }
    return out;
  };

  std::vector<DayOutput> outputs(static_cast<std::size_t>(config.days));
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const int workers = std::min(config.days, config.threads > 0 ? config.threads : static_cast<int>(hw));
  if (workers <= 1) {
    for (int d = 0; d < config.days; ++d) outputs[d] = run_day(d);
  } else {
    std::atomic<int> next{0};
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (int d = next++; d < config.days; d = next++) outputs[d] = run_day(d);
      });
    }
  }

  for (std::size_t d = 0; d < outputs.size(); ++d) {
    result.topline_revenue[d] = outputs[d].revenue;
    result.topline_impressions[d] = outputs[d].impressions;
    for (std::size_t p = 0; p < pairs.size(); ++p) result.pairs[p].days[d] = outputs[d].pairs[p];
  }
  return result;
}

}  // namespace adsem
