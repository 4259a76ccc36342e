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

#include "adsem/extraction.hpp"
#include "adsem/vocab.hpp"

namespace adsem {

struct AttributeWeights {
  double brand = 0.2;
  double product = 0.5;
  double contextual = 0.3;

  bool operator==(const AttributeWeights&) const = default;
};

struct SimilarityParams {
  double theta = 0.3;
  AttributeWeights attr_weights;

  bool operator==(const SimilarityParams&) const = default;
};

// Throws kInvalidArgument unless theta is in [0,1] and the weights are
// nonnegative and sum to 1 within 1e-9.
void validate(const SimilarityParams& params);

// |a ∩ b| / |a ∪ b|, and 0 when both are empty.
double jaccard(const StringSet& a, const StringSet& b);
// Same, over strictly increasing id arrays.
double jaccard(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b);

// Phrase-set Jaccard when it reaches theta, token-set Jaccard otherwise.
double fuzzy_match(const StringSet& phrases1, const StringSet& tokens1, const StringSet& phrases2,
                   const StringSet& tokens2, double theta);
double fuzzy_match(const SemanticMetadata& meta1, const SemanticMetadata& meta2,
                   const SimilarityParams& params);

// Sum over shared category labels of the product of the two scores. Not
// normalized: the result can exceed 1 when several categories are shared.
double category_overlap_score(const SemanticMetadata& meta1, const SemanticMetadata& meta2);

// Weighted brand / product / contextual similarity, clamped to [0,1].
double attribute_relevance(const SemanticMetadata& meta1, const SemanticMetadata& meta2,
                           const SimilarityParams& params);

// Id-encoded forms used on the serving path; they agree exactly with the
// string forms when both sides were compiled against the same vocabularies.
double category_overlap_score(const CompiledMetadata& meta1, const CompiledMetadata& meta2);
double attribute_relevance(const CompiledMetadata& meta1, const CompiledMetadata& meta2,
                           const SimilarityParams& params);

}  // namespace adsem
