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

#include <algorithm>
#include <string>
#include <vector>

#include "adsem/catalog.hpp"
#include "adsem/engine.hpp"
#include "adsem/rng.hpp"
#include "adsem/similarity.hpp"
#include "graph_oracle.hpp"

namespace adsem::testing {

// Independent reference for the two-stage ranking.
inline std::vector<RankedItem> reference_retrieve(const Engine& engine, const std::string& seed_id, int k) {
  const auto& st = engine.state();
  const auto& cfg = st.config;
  const auto& meta = st.metadata;
  const NodeId seed = st.index.node_of(seed_id);
  const auto paths = best_paths(seed, st.graph, cfg.depth);

  struct Entry {
    NodeId node;
    double s1;
    int hops;
  };
  std::vector<Entry> pool;
  for (NodeId b = 0; b < meta.size(); ++b) {
    if (b == seed) continue;
    const double overlap = category_overlap_score(meta[seed], meta[b]);
    auto it = paths.find(b);
    if (it != paths.end()) {
      pool.push_back({b, std::max(overlap, it->second.weight), it->second.hops});
    } else if (overlap > 0.0) {
      pool.push_back({b, overlap, 1});
    }
  }
  if (pool.empty()) return {};
  double lo = pool[0].s1, hi = pool[0].s1;
  for (const auto& e : pool) {
    lo = std::min(lo, e.s1);
    hi = std::max(hi, e.s1);
  }
  std::vector<RankedItem> items;
  for (const auto& e : pool) {
    const double s2 = attribute_relevance(meta[seed], meta[e.node], cfg.similarity);
    const double norm = hi > lo ? (e.s1 - lo) / (hi - lo) : 1.0;
    items.push_back({meta[e.node].ad_id, cfg.blend_alpha * norm + (1.0 - cfg.blend_alpha) * s2, e.s1, s2, e.hops});
  }
  std::sort(items.begin(), items.end(), [](const RankedItem& a, const RankedItem& b) {
    return a.final_score != b.final_score ? a.final_score > b.final_score : a.ad_id < b.ad_id;
  });
  if (items.size() > static_cast<std::size_t>(k)) items.resize(k);
  return items;
}

inline std::vector<RankedItem> reference_baseline(const AdCatalog& catalog, const std::string& seed_id, int k) {
  const StringSet seed_tokens = raw_tokens(catalog.at(seed_id).title);
  struct Scored {
    std::string id;
    std::size_t overlap;
    std::uint64_t tie;
  };
  std::vector<Scored> scored;
  for (const auto& ad : catalog.ads()) {
    if (ad.ad_id == seed_id) continue;
    std::size_t n = 0;
    for (const auto& t : raw_tokens(ad.title)) n += seed_tokens.count(t);
    scored.push_back({ad.ad_id, n, baseline_tie_key(fnv1a64(seed_id), fnv1a64(ad.ad_id))});
  }
  std::sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) {
    if (a.overlap != b.overlap) return a.overlap > b.overlap;
    if (a.tie != b.tie) return a.tie < b.tie;
    return a.id < b.id;
  });
  std::vector<RankedItem> out;
  for (std::size_t i = 0; i < scored.size() && i < static_cast<std::size_t>(k); ++i) {
    const double s = static_cast<double>(scored[i].overlap);
    out.push_back({scored[i].id, s, s, 0.0, 0});
  }
  return out;
}

}  // namespace adsem::testing
