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

#include "adsem/similarity.hpp"

#include <algorithm>
#include <cmath>

#include "adsem/error.hpp"
#include "adsem/kernels.hpp"

namespace adsem {

void validate(const SimilarityParams& params) {
  if (!(params.theta >= 0.0 && params.theta <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "theta must lie in [0,1]");
  }
  const auto& w = params.attr_weights;
  if (!(w.brand >= 0.0 && w.product >= 0.0 && w.contextual >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "attribute weights must be nonnegative");
  }
  if (std::abs(w.brand + w.product + w.contextual - 1.0) > 1e-9) {
    throw Error(ErrorCode::kInvalidArgument, "attribute weights must sum to 1");
  }
}

namespace {

double ratio(std::size_t inter, std::size_t na, std::size_t nb) {
  const std::size_t uni = na + nb - inter;
  return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

std::size_t intersection_size(const StringSet& a, const StringSet& b) {
  std::size_t n = 0;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++n;
      ++i;
      ++j;
    }
  }
  return n;
}

double combine(double brand, double product, double contextual, const AttributeWeights& w) {
  const double r = w.brand * brand + w.product * product + w.contextual * contextual;
  return std::clamp(r, 0.0, 1.0);
}

}  // namespace

double jaccard(const StringSet& a, const StringSet& b) {
  return ratio(intersection_size(a, b), a.size(), b.size());
}

double jaccard(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b) {
  return ratio(kernels::intersect_count(a, b), a.size(), b.size());
}

double fuzzy_match(const StringSet& phrases1, const StringSet& tokens1, const StringSet& phrases2,
                   const StringSet& tokens2, double theta) {
  const double p = jaccard(phrases1, phrases2);
  return p >= theta ? p : jaccard(tokens1, tokens2);
}

double fuzzy_match(const SemanticMetadata& meta1, const SemanticMetadata& meta2,
                   const SimilarityParams& params) {
  return fuzzy_match(meta1.phrases, meta1.tokens, meta2.phrases, meta2.tokens, params.theta);
}

double category_overlap_score(const SemanticMetadata& meta1, const SemanticMetadata& meta2) {
  double sum = 0.0;
  for (const auto& [label, score] : meta1.categories) {
    if (auto it = meta2.categories.find(label); it != meta2.categories.end()) {
      sum += score * it->second;
    }
  }
  return sum;
}

double attribute_relevance(const SemanticMetadata& meta1, const SemanticMetadata& meta2,
                           const SimilarityParams& params) {
  const auto ctx1 = project_contextual(meta1.contextual_attrs);
  const auto ctx2 = project_contextual(meta2.contextual_attrs);
  return combine(jaccard(meta1.brand_attrs, meta2.brand_attrs),
                 jaccard(meta1.product_attrs, meta2.product_attrs),
                 fuzzy_match(ctx1.phrases, ctx1.tokens, ctx2.phrases, ctx2.tokens, params.theta),
                 params.attr_weights);
}

double category_overlap_score(const CompiledMetadata& meta1, const CompiledMetadata& meta2) {
  return kernels::sparse_dot({meta1.category_ids, meta1.category_scores},
                             {meta2.category_ids, meta2.category_scores});
}

double attribute_relevance(const CompiledMetadata& meta1, const CompiledMetadata& meta2,
                           const SimilarityParams& params) {
  const double p = jaccard(meta1.contextual_phrases, meta2.contextual_phrases);
  const double contextual = p >= params.theta ? p : jaccard(meta1.contextual_tokens, meta2.contextual_tokens);
  return combine(jaccard(meta1.brand, meta2.brand), jaccard(meta1.product, meta2.product), contextual,
                 params.attr_weights);
}

}  // namespace adsem
