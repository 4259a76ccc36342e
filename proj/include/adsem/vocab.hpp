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
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "adsem/extraction.hpp"

namespace adsem {

// Interns strings to dense ids assigned in lexicographic order, so that
// ascending id order equals ascending string order.
class Vocabulary {
 public:
  Vocabulary() = default;
  // Input need not be sorted or unique.
  explicit Vocabulary(std::vector<std::string> words);

  std::optional<std::uint32_t> find(std::string_view word) const;
  const std::string& word(std::uint32_t id) const { return words_[id]; }
  std::size_t size() const { return words_.size(); }
  const std::vector<std::string>& words() const { return words_; }

  // Sorted ids of the known members of `set`; unknown members are skipped.
  std::vector<std::uint32_t> encode(const StringSet& set) const;

  bool operator==(const Vocabulary& other) const { return words_ == other.words_; }

 private:
  std::vector<std::string> words_;
  std::unordered_map<std::string, std::uint32_t> ids_;
};

// Id-encoded view of the metadata fields that retrieval scores read.
struct CompiledMetadata {
  std::vector<std::uint32_t> category_ids;  // ascending
  std::vector<double> category_scores;      // parallel to category_ids
  std::vector<std::uint32_t> brand;
  std::vector<std::uint32_t> product;
  std::vector<std::uint32_t> contextual_phrases;
  std::vector<std::uint32_t> contextual_tokens;

  bool operator==(const CompiledMetadata&) const = default;
};

// Contextual attributes projected into the phrase/token shape used by the
// fuzzy matcher: multi-token attributes are phrases, every attribute
// contributes its tokens.
struct ContextualProjection {
  StringSet phrases;
  StringSet tokens;
};
ContextualProjection project_contextual(const StringSet& contextual_attrs);

struct MetadataVocabularies {
  Vocabulary categories;
  Vocabulary attributes;

  bool operator==(const MetadataVocabularies&) const = default;
};

MetadataVocabularies build_vocabularies(const std::vector<SemanticMetadata>& metadata);
CompiledMetadata compile(const SemanticMetadata& meta, const MetadataVocabularies& vocab);

}  // namespace adsem
