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
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "adsem/extraction.hpp"
#include "adsem/vocab.hpp"

namespace adsem {

using NodeId = std::uint32_t;

struct Posting {
  NodeId node;
  double score;

  bool operator==(const Posting&) const = default;
};

// Inverted index category -> ads. Nodes are numbered in ascending ad_id
// order, so comparing node ids compares ad_ids.
struct CategoryIndex {
  std::vector<std::string> ad_ids;   // node -> ad_id, ascending
  Vocabulary labels;                 // category label <-> label id
  std::vector<std::vector<Posting>> postings;  // by label id; score desc, node asc
  std::size_t doc_count = 0;

  std::span<const Posting> posting(std::string_view label) const;
  // Throws kUnknownSeed.
  NodeId node_of(std::string_view ad_id) const;
  bool contains(std::string_view ad_id) const;

  bool operator==(const CategoryIndex&) const = default;
};

// Throws kDuplicate when two records share an ad_id.
CategoryIndex build_index(const std::vector<SemanticMetadata>& metadata);

struct Edge {
  NodeId to;
  double weight;

  bool operator==(const Edge&) const = default;
};

struct GraphParams {
  double edge_threshold = 0.1;
  int max_degree = 64;

  bool operator==(const GraphParams&) const = default;
};

void validate(const GraphParams& params);

// Undirected ad-to-ad graph in CSR form; each adjacency list is sorted by
// weight desc, then node asc.
struct SemanticGraph {
  std::vector<std::uint64_t> offsets;  // size node_count + 1
  std::vector<Edge> edges;
  GraphParams params;

  std::size_t node_count() const { return offsets.empty() ? 0 : offsets.size() - 1; }
  std::span<const Edge> neighbors(NodeId node) const {
    return {edges.data() + offsets[node], edges.data() + offsets[node + 1]};
  }

  bool operator==(const SemanticGraph&) const = default;
};

// Metadata record for every index node, in node order. Throws kNotFound when
// the index names an ad with no metadata.
std::vector<const SemanticMetadata*> align_to_index(const CategoryIndex& index,
                                                    const std::vector<SemanticMetadata>& metadata);

// Edges come from posting-list co-occurrence with weight = category overlap
// score. Each node keeps its max_degree strongest edges at or above the
// threshold; entries tied with the last kept weight are kept as well, so that
// ads with identical metadata are treated identically. The kept lists are
// then symmetrized by union.
SemanticGraph build_graph(const CategoryIndex& index, const std::vector<SemanticMetadata>& metadata,
                          const GraphParams& params);
SemanticGraph build_graph(const CategoryIndex& index, std::span<const CompiledMetadata> compiled,
                          const GraphParams& params);

struct Expansion {
  NodeId node;
  double path_weight;
  int hops;

  bool operator==(const Expansion&) const = default;
};

// Best-first traversal from all seeds at once. Path weight is the product of
// per-hop factors min(1, edge weight), so it never grows along a path. The
// frontier pops by (weight desc, hops asc, node asc); each node is emitted on
// its first pop, which carries its best weight over paths of at most `depth`
// hops and the fewest hops among paths of that weight. Seeds are not emitted. Stops after `budget` emissions.
// Throws kInvalidArgument for depth < 1 or budget < 1 and kUnknownSeed for a
// seed outside the graph.
std::vector<Expansion> expand(std::span<const NodeId> seeds, const SemanticGraph& graph, int depth,
                              int budget);
std::vector<Expansion> expand(const std::vector<std::string>& seeds, const CategoryIndex& index,
                              const SemanticGraph& graph, int depth, int budget);

}  // namespace adsem
