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

#include "adsem/vocab.hpp"

#include <algorithm>

namespace adsem {

Vocabulary::Vocabulary(std::vector<std::string> words) : words_(std::move(words)) {
  std::sort(words_.begin(), words_.end());
  words_.erase(std::unique(words_.begin(), words_.end()), words_.end());
  ids_.reserve(words_.size());
  for (std::uint32_t i = 0; i < words_.size(); ++i) ids_.emplace(words_[i], i);
}

std::optional<std::uint32_t> Vocabulary::find(std::string_view word) const {
  auto it = ids_.find(std::string(word));
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::uint32_t> Vocabulary::encode(const StringSet& set) const {
  std::vector<std::uint32_t> out;
  out.reserve(set.size());
  for (const auto& s : set) {
    if (auto id = find(s)) out.push_back(*id);
  }
  // StringSet iterates in string order, which is id order.
  return out;
}

ContextualProjection project_contextual(const StringSet& contextual_attrs) {
  ContextualProjection p;
  for (const auto& attr : contextual_attrs) {
    auto seq = token_sequence(attr);
    if (seq.size() >= 2) {
      std::string phrase;
      for (const auto& t : seq) {
        if (!phrase.empty()) phrase += ' ';
        phrase += t;
      }
      p.phrases.insert(std::move(phrase));
    }
    p.tokens.insert(seq.begin(), seq.end());
  }
  return p;
}

MetadataVocabularies build_vocabularies(const std::vector<SemanticMetadata>& metadata) {
  std::vector<std::string> labels;
  std::vector<std::string> attrs;
  for (const auto& m : metadata) {
    for (const auto& [label, score] : m.categories) labels.push_back(label);
    attrs.insert(attrs.end(), m.brand_attrs.begin(), m.brand_attrs.end());
    attrs.insert(attrs.end(), m.product_attrs.begin(), m.product_attrs.end());
    auto ctx = project_contextual(m.contextual_attrs);
    attrs.insert(attrs.end(), ctx.phrases.begin(), ctx.phrases.end());
    attrs.insert(attrs.end(), ctx.tokens.begin(), ctx.tokens.end());
  }
  return {Vocabulary(std::move(labels)), Vocabulary(std::move(attrs))};
}

CompiledMetadata compile(const SemanticMetadata& meta, const MetadataVocabularies& vocab) {
  CompiledMetadata c;
  for (const auto& [label, score] : meta.categories) {
    if (auto id = vocab.categories.find(label)) {
      c.category_ids.push_back(*id);
      c.category_scores.push_back(score);
    }
  }
  c.brand = vocab.attributes.encode(meta.brand_attrs);
  c.product = vocab.attributes.encode(meta.product_attrs);
  auto ctx = project_contextual(meta.contextual_attrs);
  c.contextual_phrases = vocab.attributes.encode(ctx.phrases);
  c.contextual_tokens = vocab.attributes.encode(ctx.tokens);
  return c;
}

}  // namespace adsem
