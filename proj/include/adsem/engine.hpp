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
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "adsem/catalog.hpp"
#include "adsem/extraction.hpp"
#include "adsem/graph.hpp"
#include "adsem/similarity.hpp"
#include "adsem/vocab.hpp"

namespace adsem {

enum class RetrieverTag { kSemantic, kBaseline };

std::string_view to_string(RetrieverTag tag);
RetrieverTag parse_retriever_tag(std::string_view s);

struct EngineConfig {
  int k_default = 100;
  int stage1_budget = 500;
  int depth = 2;
  SimilarityParams similarity;
  double blend_alpha = 0.5;
  GraphParams graph;

  bool operator==(const EngineConfig&) const = default;
};

void validate(const EngineConfig& config);

struct RankedItem {
  std::string ad_id;
  double final_score = 0.0;
  double stage1_score = 0.0;
  double stage2_score = 0.0;
  int hop_count = 0;

  bool operator==(const RankedItem&) const = default;
};

struct RankedCandidates {
  std::string seed_id;
  std::vector<RankedItem> items;  // final_score desc, ad_id asc
  int k = 0;
  RetrieverTag retriever_tag = RetrieverTag::kSemantic;

  std::vector<std::string> ids() const;
  bool operator==(const RankedCandidates&) const = default;
};

std::string to_json(const RankedCandidates& candidates);

// Raw-title table behind the non-semantic baseline retriever.
struct BaselineTable {
  std::vector<std::string> ad_ids;  // ascending
  std::vector<std::string> titles;  // parallel to ad_ids

  bool empty() const { return ad_ids.empty(); }
  bool operator==(const BaselineTable&) const = default;
};

BaselineTable make_baseline_table(const AdCatalog& catalog);

// Everything a snapshot persists.
struct EngineState {
  EngineConfig config;
  std::vector<SemanticMetadata> metadata;  // ascending ad_id, aligned with index nodes
  CategoryIndex index;
  SemanticGraph graph;
  BaselineTable baseline;

  bool operator==(const EngineState&) const = default;
};

// Builds index and graph from extractor output. The catalog, when given,
// supplies the baseline retriever's titles.
EngineState build_engine_state(std::vector<SemanticMetadata> metadata, const EngineConfig& config,
                               const AdCatalog* catalog = nullptr);

// Frozen retrieval engine; every const method is safe to call concurrently.
class Engine {
 public:
  explicit Engine(EngineState state);

  // Two-stage semantic retrieval. Throws kUnknownSeed, kUnavailable for an
  // empty index and kInvalidArgument for k < 1.
  RankedCandidates retrieve(std::string_view seed_id, int k) const;
  RankedCandidates retrieve(std::string_view seed_id) const { return retrieve(seed_id, state_.config.k_default); }

  // Raw title token overlap ranking with id-hash tie-breaking. Throws
  // kUnavailable when the state carries no baseline table.
  RankedCandidates baseline_retrieve(std::string_view seed_id, int k) const;

  RankedCandidates retrieve_with(RetrieverTag tag, std::string_view seed_id, int k) const;
  bool knows(RetrieverTag tag, std::string_view ad_id) const;

  const EngineState& state() const { return state_; }
  const EngineConfig& config() const { return state_.config; }
  std::size_t ad_count() const { return state_.index.ad_ids.size(); }
  const CompiledMetadata& compiled(NodeId node) const { return compiled_[node]; }
  const MetadataVocabularies& vocabularies() const { return vocab_; }

 private:
  EngineState state_;
  MetadataVocabularies vocab_;
  std::vector<CompiledMetadata> compiled_;
  // Baseline: raw title tokens as ids, plus per-ad id hashes for tie-breaks.
  std::vector<std::vector<std::uint32_t>> baseline_tokens_;
  std::vector<std::uint64_t> baseline_hashes_;
};

// Tie-break key of the baseline: a fixed pseudo-random permutation of the
// candidates, keyed by the seed.
std::uint64_t baseline_tie_key(std::uint64_t seed_hash, std::uint64_t candidate_hash);

}  // namespace adsem
