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

#include "adsem/engine.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_map>

#include "adsem/error.hpp"
#include "adsem/kernels.hpp"
#include "adsem/rng.hpp"
#include "json.hpp"

namespace adsem {

std::string_view to_string(RetrieverTag tag) {
  return tag == RetrieverTag::kSemantic ? "semantic" : "baseline";
}

RetrieverTag parse_retriever_tag(std::string_view s) {
  if (s == "semantic" || s == "SEMANTIC") return RetrieverTag::kSemantic;
  if (s == "baseline" || s == "BASELINE") return RetrieverTag::kBaseline;
  throw Error(ErrorCode::kInvalidArgument, "unknown retriever: " + std::string(s));
}

void validate(const EngineConfig& config) {
  if (config.k_default < 1 || config.k_default > config.stage1_budget) {
    throw Error(ErrorCode::kInvalidArgument, "config requires 1 <= k_default <= stage1_budget");
  }
  if (config.depth < 1) throw Error(ErrorCode::kInvalidArgument, "traversal depth must be >= 1");
  if (!(config.blend_alpha >= 0.0 && config.blend_alpha <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "blend_alpha must lie in [0,1]");
  }
  validate(config.similarity);
  validate(config.graph);
}

std::vector<std::string> RankedCandidates::ids() const {
  std::vector<std::string> out;
  out.reserve(items.size());
  for (const auto& item : items) out.push_back(item.ad_id);
  return out;
}

std::string to_json(const RankedCandidates& candidates) {
  nlohmann::json items = nlohmann::json::array();
  for (const auto& item : candidates.items) {
    items.push_back({{"ad_id", item.ad_id},
                     {"final_score", item.final_score},
                     {"stage1_score", item.stage1_score},
                     {"stage2_score", item.stage2_score},
                     {"hop_count", item.hop_count}});
  }
  nlohmann::json doc = {{"seed_id", candidates.seed_id},
                        {"k", candidates.k},
                        {"retriever", std::string(to_string(candidates.retriever_tag))},
                        {"items", std::move(items)}};
  return doc.dump();
}

BaselineTable make_baseline_table(const AdCatalog& catalog) {
  std::vector<const Ad*> ads;
  for (const auto& ad : catalog.ads()) ads.push_back(&ad);
  std::sort(ads.begin(), ads.end(), [](const Ad* a, const Ad* b) { return a->ad_id < b->ad_id; });
  BaselineTable table;
  for (const Ad* ad : ads) {
    table.ad_ids.push_back(ad->ad_id);
    table.titles.push_back(ad->title);
  }
  return table;
}

EngineState build_engine_state(std::vector<SemanticMetadata> metadata, const EngineConfig& config,
                               const AdCatalog* catalog) {
  validate(config);
  EngineState state;
  state.config = config;
  state.index = build_index(metadata);
  std::sort(metadata.begin(), metadata.end(),
            [](const SemanticMetadata& a, const SemanticMetadata& b) { return a.ad_id < b.ad_id; });
  state.metadata = std::move(metadata);
  state.graph = build_graph(state.index, state.metadata, config.graph);
  if (catalog) state.baseline = make_baseline_table(*catalog);
  return state;
}

std::uint64_t baseline_tie_key(std::uint64_t seed_hash, std::uint64_t candidate_hash) {
  return splitmix64(seed_hash ^ splitmix64(candidate_hash));
}

Engine::Engine(EngineState state) : state_(std::move(state)) {
  validate(state_.config);
  if (state_.metadata.size() != state_.index.ad_ids.size()) {
    throw Error(ErrorCode::kInvalidArgument, "metadata and index disagree on ad count");
  }
  for (std::size_t i = 0; i < state_.metadata.size(); ++i) {
    if (state_.metadata[i].ad_id != state_.index.ad_ids[i]) {
      throw Error(ErrorCode::kInvalidArgument, "metadata is not aligned with index nodes");
    }
  }
  if (state_.graph.node_count() != state_.index.ad_ids.size()) {
    throw Error(ErrorCode::kInvalidArgument, "graph and index disagree on node count");
  }
  vocab_ = build_vocabularies(state_.metadata);
  compiled_.reserve(state_.metadata.size());
  for (const auto& m : state_.metadata) compiled_.push_back(compile(m, vocab_));

  const auto& titles = state_.baseline.titles;
  std::vector<StringSet> raw(titles.size());
  std::vector<std::string> words;
  for (std::size_t i = 0; i < titles.size(); ++i) {
    raw[i] = raw_tokens(titles[i]);
    words.insert(words.end(), raw[i].begin(), raw[i].end());
  }
  const Vocabulary title_vocab(std::move(words));
  for (std::size_t i = 0; i < titles.size(); ++i) {
    baseline_tokens_.push_back(title_vocab.encode(raw[i]));
    baseline_hashes_.push_back(fnv1a64(state_.baseline.ad_ids[i]));
  }
}

namespace {

struct Scratch {
  std::vector<double> overlap;
  std::vector<NodeId> touched;
};

Scratch& scratch_for(std::size_t n) {
  thread_local Scratch s;
  if (s.overlap.size() < n) s.overlap.assign(n, 0.0);
  return s;
}

struct PoolEntry {
  NodeId node;
  double stage1;
  int hops;
};

}  // namespace

RankedCandidates Engine::retrieve(std::string_view seed_id, int k) const {
  if (k < 1) throw Error(ErrorCode::kInvalidArgument, "k must be >= 1");
  if (state_.index.ad_ids.empty()) throw Error(ErrorCode::kUnavailable, "index is empty");
  const NodeId seed = state_.index.node_of(seed_id);
  const auto& cfg = state_.config;
  const CompiledMetadata& seed_meta = compiled_[seed];

  Scratch& scratch = scratch_for(compiled_.size());
  auto& overlap = scratch.overlap;
  auto& touched = scratch.touched;
  touched.clear();
  for (std::size_t c = 0; c < seed_meta.category_ids.size(); ++c) {
    const double s = seed_meta.category_scores[c];
    for (const Posting& p : state_.index.postings[seed_meta.category_ids[c]]) {
      if (overlap[p.node] == 0.0) touched.push_back(p.node);
      overlap[p.node] += s * p.score;
    }
  }

  std::vector<PoolEntry> direct;
  for (NodeId b : touched) {
    if (b != seed && overlap[b] > 0.0) direct.push_back({b, overlap[b], 1});
  }
  const auto by_stage1 = [](const PoolEntry& a, const PoolEntry& b) {
    return a.stage1 != b.stage1 ? a.stage1 > b.stage1 : a.node < b.node;
  };
  const auto budget = static_cast<std::size_t>(cfg.stage1_budget);
  if (direct.size() > budget) {
    std::partial_sort(direct.begin(), direct.begin() + budget, direct.end(), by_stage1);
    direct.resize(budget);
  }

  std::unordered_map<NodeId, std::size_t> slot;
  std::vector<PoolEntry> pool = std::move(direct);
  slot.reserve(pool.size() * 2);
  for (std::size_t i = 0; i < pool.size(); ++i) slot.emplace(pool[i].node, i);
  const NodeId seeds[] = {seed};
  for (const Expansion& e : expand(seeds, state_.graph, cfg.depth, cfg.stage1_budget)) {
    if (auto it = slot.find(e.node); it != slot.end()) {
      PoolEntry& entry = pool[it->second];
      entry.stage1 = std::max(entry.stage1, e.path_weight);
      entry.hops = e.hops;
    } else {
      slot.emplace(e.node, pool.size());
      pool.push_back({e.node, std::max(overlap[e.node], e.path_weight), e.hops});
    }
  }
  for (NodeId b : touched) overlap[b] = 0.0;
  touched.clear();

  RankedCandidates out;
  out.seed_id = std::string(seed_id);
  out.k = k;
  out.retriever_tag = RetrieverTag::kSemantic;
  if (pool.empty()) return out;

  // Fixed pool order keeps the blend input layout deterministic.
  std::sort(pool.begin(), pool.end(), [](const PoolEntry& a, const PoolEntry& b) { return a.node < b.node; });
  std::vector<double> stage1(pool.size()), stage2(pool.size()), final_score(pool.size());
  for (std::size_t i = 0; i < pool.size(); ++i) {
    stage1[i] = pool[i].stage1;
    stage2[i] = attribute_relevance(seed_meta, compiled_[pool[i].node], cfg.similarity);
  }
  kernels::blend(stage1, stage2, kernels::min_max(stage1), cfg.blend_alpha, final_score);

  std::vector<std::size_t> order(pool.size());
  std::iota(order.begin(), order.end(), 0);
  const std::size_t take = std::min<std::size_t>(order.size(), static_cast<std::size_t>(k));
  std::partial_sort(order.begin(), order.begin() + take, order.end(), [&](std::size_t a, std::size_t b) {
    return final_score[a] != final_score[b] ? final_score[a] > final_score[b] : pool[a].node < pool[b].node;
  });
  out.items.reserve(take);
  for (std::size_t r = 0; r < take; ++r) {
    const std::size_t i = order[r];
    out.items.push_back({state_.index.ad_ids[pool[i].node], final_score[i], stage1[i], stage2[i], pool[i].hops});
  }
  return out;
}

RankedCandidates Engine::baseline_retrieve(std::string_view seed_id, int k) const {
  if (k < 1) throw Error(ErrorCode::kInvalidArgument, "k must be >= 1");
  const auto& ids = state_.baseline.ad_ids;
  if (ids.empty()) throw Error(ErrorCode::kUnavailable, "snapshot carries no baseline title table");
  auto it = std::lower_bound(ids.begin(), ids.end(), seed_id,
                             [](const std::string& a, std::string_view b) { return a < b; });
  if (it == ids.end() || *it != seed_id) {
    throw Error(ErrorCode::kUnknownSeed, "unknown ad id: " + std::string(seed_id));
  }
  const auto seed = static_cast<std::size_t>(it - ids.begin());

  struct Scored {
    std::uint32_t node;
    std::size_t overlap;
    std::uint64_t tie;
  };
  std::vector<Scored> scored;
  scored.reserve(ids.size());
  const auto& seed_tokens = baseline_tokens_[seed];
  for (std::size_t b = 0; b < ids.size(); ++b) {
    if (b == seed) continue;
    scored.push_back({static_cast<std::uint32_t>(b), kernels::intersect_count(seed_tokens, baseline_tokens_[b]),
                      baseline_tie_key(baseline_hashes_[seed], baseline_hashes_[b])});
  }
  const std::size_t take = std::min<std::size_t>(scored.size(), static_cast<std::size_t>(k));
  std::partial_sort(scored.begin(), scored.begin() + take, scored.end(), [](const Scored& a, const Scored& b) {
    if (a.overlap != b.overlap) return a.overlap > b.overlap;
    if (a.tie != b.tie) return a.tie < b.tie;
    return a.node < b.node;
  });

  RankedCandidates out;
  out.seed_id = std::string(seed_id);
  out.k = k;
  out.retriever_tag = RetrieverTag::kBaseline;
  out.items.reserve(take);
  for (std::size_t r = 0; r < take; ++r) {
    const double score = static_cast<double>(scored[r].overlap);
    out.items.push_back({ids[scored[r].node], score, score, 0.0, 0});
  }
  return out;
}

RankedCandidates Engine::retrieve_with(RetrieverTag tag, std::string_view seed_id, int k) const {
  return tag == RetrieverTag::kSemantic ? retrieve(seed_id, k) : baseline_retrieve(seed_id, k);
}

bool Engine::knows(RetrieverTag tag, std::string_view ad_id) const {
  if (tag == RetrieverTag::kSemantic) return state_.index.contains(ad_id);
  return std::binary_search(state_.baseline.ad_ids.begin(), state_.baseline.ad_ids.end(), ad_id,
                            [](const auto& a, const auto& b) { return std::string_view(a) < std::string_view(b); });
}

}  // namespace adsem
