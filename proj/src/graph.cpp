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

#include "adsem/graph.hpp"

#include <algorithm>
#include <queue>
#include <thread>
#include <unordered_map>

#include "adsem/error.hpp"

namespace adsem {

std::span<const Posting> CategoryIndex::posting(std::string_view label) const {
  if (auto id = labels.find(label)) return postings[*id];
  return {};
}

NodeId CategoryIndex::node_of(std::string_view ad_id) const {
  auto it = std::lower_bound(ad_ids.begin(), ad_ids.end(), ad_id,
                             [](const std::string& a, std::string_view b) { return a < b; });
  if (it == ad_ids.end() || *it != ad_id) {
    throw Error(ErrorCode::kUnknownSeed, "unknown ad id: " + std::string(ad_id));
  }
  return static_cast<NodeId>(it - ad_ids.begin());
}

bool CategoryIndex::contains(std::string_view ad_id) const {
  return std::binary_search(ad_ids.begin(), ad_ids.end(), ad_id,
                            [](const auto& a, const auto& b) { return std::string_view(a) < std::string_view(b); });
}

CategoryIndex build_index(const std::vector<SemanticMetadata>& metadata) {
  CategoryIndex index;
  std::vector<const SemanticMetadata*> sorted;
  sorted.reserve(metadata.size());
  for (const auto& m : metadata) sorted.push_back(&m);
  std::sort(sorted.begin(), sorted.end(),
            [](const SemanticMetadata* a, const SemanticMetadata* b) { return a->ad_id < b->ad_id; });
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i]->ad_id == sorted[i - 1]->ad_id) {
      throw Error(ErrorCode::kDuplicate, "duplicate ad_id in metadata: " + sorted[i]->ad_id);
    }
  }

  std::vector<std::string> labels;
  for (const auto* m : sorted) {
    index.ad_ids.push_back(m->ad_id);
    for (const auto& [label, score] : m->categories) labels.push_back(label);
  }
  index.labels = Vocabulary(std::move(labels));
  index.postings.resize(index.labels.size());
  for (NodeId node = 0; node < sorted.size(); ++node) {
    for (const auto& [label, score] : sorted[node]->categories) {
      index.postings[*index.labels.find(label)].push_back({node, score});
    }
  }
  for (auto& list : index.postings) {
    std::sort(list.begin(), list.end(), [](const Posting& a, const Posting& b) {
      return a.score != b.score ? a.score > b.score : a.node < b.node;
    });
  }
  index.doc_count = sorted.size();
  return index;
}

void validate(const GraphParams& params) {
  if (!(params.edge_threshold >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "edge_threshold must be >= 0");
  if (params.max_degree < 1) throw Error(ErrorCode::kInvalidArgument, "max_degree must be >= 1");
}

std::vector<const SemanticMetadata*> align_to_index(const CategoryIndex& index,
                                                    const std::vector<SemanticMetadata>& metadata) {
  std::unordered_map<std::string_view, const SemanticMetadata*> by_id;
  for (const auto& m : metadata) by_id.emplace(m.ad_id, &m);
  std::vector<const SemanticMetadata*> aligned;
  aligned.reserve(index.ad_ids.size());
  for (const auto& id : index.ad_ids) {
    auto it = by_id.find(id);
    if (it == by_id.end()) throw Error(ErrorCode::kNotFound, "no metadata for indexed ad " + id);
    aligned.push_back(it->second);
  }
  return aligned;
}

SemanticGraph build_graph(const CategoryIndex& index, const std::vector<SemanticMetadata>& metadata,
                          const GraphParams& params) {
  const auto aligned = align_to_index(index, metadata);
  MetadataVocabularies vocab{index.labels, {}};
  std::vector<CompiledMetadata> compiled;
  compiled.reserve(aligned.size());
  for (const auto* m : aligned) compiled.push_back(compile(*m, vocab));
  return build_graph(index, compiled, params);
}

namespace {

bool stronger(const Edge& a, const Edge& b) {
  return a.weight != b.weight ? a.weight > b.weight : a.to < b.to;
}

// Kept (pre-symmetrization) edges of nodes [begin, end).
void select_edges(const CategoryIndex& index, std::span<const CompiledMetadata> compiled,
                  const GraphParams& params, std::size_t begin, std::size_t end,
                  std::vector<std::vector<Edge>>& kept) {
  std::vector<double> acc(compiled.size(), 0.0);
  std::vector<NodeId> touched;
  std::vector<Edge> candidates;
  for (std::size_t a = begin; a < end; ++a) {
    const auto& meta = compiled[a];
    // Ascending label order, matching the summation order of sparse_dot.
    for (std::size_t c = 0; c < meta.category_ids.size(); ++c) {
      const double sa = meta.category_scores[c];
      for (const Posting& p : index.postings[meta.category_ids[c]]) {
        if (acc[p.node] == 0.0) touched.push_back(p.node);
        acc[p.node] += sa * p.score;
      }
    }
    candidates.clear();
    for (NodeId b : touched) {
      if (b != a && acc[b] >= params.edge_threshold && acc[b] > 0.0) candidates.push_back({b, acc[b]});
      acc[b] = 0.0;
    }
    touched.clear();
    std::sort(candidates.begin(), candidates.end(), stronger);
    const auto limit = static_cast<std::size_t>(params.max_degree);
    if (candidates.size() > limit) {
      std::size_t cut = limit;
      while (cut < candidates.size() && candidates[cut].weight == candidates[limit - 1].weight) ++cut;
      candidates.resize(cut);
    }
    kept[a] = candidates;
  }
}

}  // namespace

SemanticGraph build_graph(const CategoryIndex& index, std::span<const CompiledMetadata> compiled,
                          const GraphParams& params) {
  validate(params);
  if (compiled.size() != index.ad_ids.size()) {
    throw Error(ErrorCode::kInvalidArgument, "compiled metadata does not match index size");
  }
  const std::size_t n = compiled.size();
  std::vector<std::vector<Edge>> kept(n);

  const std::size_t workers = std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, 16);
  if (workers == 1 || n < 2048) {
    select_edges(index, compiled, params, 0, n, kept);
  } else {
    std::vector<std::jthread> pool;
    const std::size_t chunk = (n + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
      const std::size_t b = std::min(n, w * chunk), e = std::min(n, b + chunk);
      pool.emplace_back([&, b, e] { select_edges(index, compiled, params, b, e, kept); });
    }
  }

  std::vector<std::vector<Edge>> adjacency(n);
  for (NodeId a = 0; a < n; ++a) {
    for (const Edge& e : kept[a]) {
      adjacency[a].push_back(e);
      adjacency[e.to].push_back({a, e.weight});
    }
  }
  SemanticGraph graph;
  graph.params = params;
  graph.offsets.reserve(n + 1);
  graph.offsets.push_back(0);
  for (auto& list : adjacency) {
    std::sort(list.begin(), list.end(), [](const Edge& x, const Edge& y) { return x.to < y.to; });
    list.erase(std::unique(list.begin(), list.end(), [](const Edge& x, const Edge& y) { return x.to == y.to; }),
               list.end());
    std::sort(list.begin(), list.end(), stronger);
    graph.edges.insert(graph.edges.end(), list.begin(), list.end());
    graph.offsets.push_back(graph.edges.size());
  }
  return graph;
}

std::vector<Expansion> expand(std::span<const NodeId> seeds, const SemanticGraph& graph, int depth,
                              int budget) {
  if (depth < 1) throw Error(ErrorCode::kInvalidArgument, "expand depth must be >= 1");
  if (budget < 1) throw Error(ErrorCode::kInvalidArgument, "expand budget must be >= 1");
  const std::size_t n = graph.node_count();
  for (NodeId s : seeds) {
    if (s >= n) throw Error(ErrorCode::kUnknownSeed, "seed node outside graph: " + std::to_string(s));
  }

  struct State {
    double weight;
    NodeId node;
    int hops;
  };
  auto lower_priority = [](const State& a, const State& b) {
    if (a.weight != b.weight) return a.weight < b.weight;
    if (a.hops != b.hops) return a.hops > b.hops;
    return a.node > b.node;
  };
  std::priority_queue<State, std::vector<State>, decltype(lower_priority)> frontier(lower_priority);

  constexpr int kUnseen = 1 << 30;
  // Fewest hops with which a node has been expanded; a later pop can only
  // help if it arrives in fewer hops. Dense per-thread arrays, reset by epoch.
  struct Marks {
    std::vector<int> hops;
    std::vector<std::uint32_t> epoch;
    std::vector<std::uint32_t> seed_epoch;
    // Strongest queued state per node; dominated pushes are skipped.
    std::vector<double> queued_weight;
    std::vector<int> queued_hops;
    std::vector<std::uint32_t> queued_epoch;
    std::uint32_t current = 0;
  };
  thread_local Marks marks;
  if (marks.hops.size() < n) {
    marks.hops.assign(n, kUnseen);
    marks.epoch.assign(n, 0);
    marks.seed_epoch.assign(n, 0);
    marks.queued_weight.assign(n, 0.0);
    marks.queued_hops.assign(n, kUnseen);
    marks.queued_epoch.assign(n, 0);
    marks.current = 0;
  }
  if (++marks.current == 0) {
    std::fill(marks.epoch.begin(), marks.epoch.end(), 0);
    std::fill(marks.seed_epoch.begin(), marks.seed_epoch.end(), 0);
    std::fill(marks.queued_epoch.begin(), marks.queued_epoch.end(), 0);
    marks.current = 1;
  }
  const std::uint32_t now = marks.current;
  auto hops_of = [&](NodeId v) { return marks.epoch[v] == now ? marks.hops[v] : kUnseen; };
  auto set_hops = [&](NodeId v, int h) {
    marks.epoch[v] = now;
    marks.hops[v] = h;
  };

  for (NodeId s : seeds) {
    marks.seed_epoch[s] = now;
    frontier.push({1.0, s, 0});
  }

  std::vector<Expansion> out;
  while (!frontier.empty() && out.size() < static_cast<std::size_t>(budget)) {
    const State s = frontier.top();
    frontier.pop();
    const int seen = hops_of(s.node);
    if (seen <= s.hops) continue;
    set_hops(s.node, s.hops);
    if (seen == kUnseen && marks.seed_epoch[s.node] != now) {
      out.push_back({s.node, s.weight, s.hops});
      if (out.size() == static_cast<std::size_t>(budget)) break;
    }
    if (s.hops >= depth) continue;
    for (const Edge& e : graph.neighbors(s.node)) {
      if (hops_of(e.to) <= s.hops + 1) continue;
      const double w = s.weight * std::min(1.0, e.weight);
      if (marks.queued_epoch[e.to] == now && marks.queued_weight[e.to] >= w && marks.queued_hops[e.to] <= s.hops + 1) {
        continue;
      }
      marks.queued_epoch[e.to] = now;
      marks.queued_weight[e.to] = w;
      marks.queued_hops[e.to] = s.hops + 1;
      frontier.push({w, e.to, s.hops + 1});
    }
  }
  return out;
}

std::vector<Expansion> expand(const std::vector<std::string>& seeds, const CategoryIndex& index,
                              const SemanticGraph& graph, int depth, int budget) {
  std::vector<NodeId> nodes;
  nodes.reserve(seeds.size());
  for (const auto& s : seeds) nodes.push_back(index.node_of(s));
  return expand(nodes, graph, depth, budget);
}

}  // namespace adsem
