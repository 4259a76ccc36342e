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

#include <string>
#include <string_view>
#include <vector>

namespace adsem {

// A category label ("group/leaf") and the keywords that evidence it.
struct Category {
  std::string label;
  std::vector<std::string> keywords;  // sorted, unique, normalized tokens

  bool operator==(const Category&) const = default;
};

class Taxonomy {
 public:
  Taxonomy() = default;
  explicit Taxonomy(std::vector<Category> categories);

  // Tab-separated "label<TAB>kw kw kw" lines; '#' starts a comment line.
  static Taxonomy parse(std::string_view text);
  static Taxonomy load(const std::string& path);
  void save(const std::string& path) const;

  // The shipped 2-level taxonomy.
  static const Taxonomy& builtin();

  // The first `topics` builtin categories, extended with generated
  // "synthetic/topicNNN" categories when more are requested than shipped.
  static Taxonomy with_topics(int topics);

  const std::vector<Category>& categories() const { return categories_; }
  bool empty() const { return categories_.empty(); }
  std::size_t size() const { return categories_.size(); }

  bool operator==(const Taxonomy&) const = default;

 private:
  std::vector<Category> categories_;  // sorted by label
};

}  // namespace adsem
