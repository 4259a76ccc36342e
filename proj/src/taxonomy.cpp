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

#include "adsem/taxonomy.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "adsem/error.hpp"
#include "adsem/text.hpp"

namespace adsem {

namespace builtin {
std::string_view taxonomy_text();
}

Taxonomy::Taxonomy(std::vector<Category> categories) : categories_(std::move(categories)) {
  for (auto& c : categories_) {
    std::sort(c.keywords.begin(), c.keywords.end());
    c.keywords.erase(std::unique(c.keywords.begin(), c.keywords.end()), c.keywords.end());
    if (c.label.empty() || c.keywords.empty()) {
      throw Error(ErrorCode::kInvalidArgument, "taxonomy category needs a label and keywords");
    }
  }
  std::sort(categories_.begin(), categories_.end(),
            [](const Category& a, const Category& b) { return a.label < b.label; });
  for (std::size_t i = 1; i < categories_.size(); ++i) {
    if (categories_[i].label == categories_[i - 1].label) {
      throw Error(ErrorCode::kDuplicate, "duplicate taxonomy label: " + categories_[i].label);
    }
  }
}

Taxonomy Taxonomy::parse(std::string_view text) {
  std::vector<Category> categories;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    const auto tab = body.find('\t');
    if (tab == std::string_view::npos) {
      throw Error(ErrorCode::kParse, "taxonomy line " + std::to_string(line_no) + ": missing tab");
    }
    Category c;
    c.label = std::string(trim(body.substr(0, tab)));
    for (auto& kw : token_sequence(body.substr(tab + 1))) c.keywords.push_back(std::move(kw));
    categories.push_back(std::move(c));
  }
  return Taxonomy(std::move(categories));
}

Taxonomy Taxonomy::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open taxonomy file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

void Taxonomy::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot write taxonomy file: " + path);
  out << "# label\tkeywords\n";
  for (const auto& c : categories_) {
    out << c.label << '\t';
    for (std::size_t i = 0; i < c.keywords.size(); ++i) out << (i ? " " : "") << c.keywords[i];
    out << '\n';
  }
}

const Taxonomy& Taxonomy::builtin() {
  static const Taxonomy t = parse(builtin::taxonomy_text());
  return t;
}

Taxonomy Taxonomy::with_topics(int topics) {
  if (topics <= 0) throw Error(ErrorCode::kInvalidArgument, "topic count must be positive");
  const auto& shipped = builtin().categories();
  std::vector<Category> out(shipped.begin(),
                            shipped.begin() + std::min<std::size_t>(shipped.size(), topics));
  for (int t = static_cast<int>(shipped.size()); t < topics; ++t) {
    char label[32];
    std::snprintf(label, sizeof label, "synthetic/topic%03d", t);
    Category c{label, {}};
    for (int k = 0; k < 8; ++k) {
      char kw[32];
      std::snprintf(kw, sizeof kw, "t%03dk%d", t, k);
      c.keywords.emplace_back(kw);
    }
    out.push_back(std::move(c));
  }
  return Taxonomy(std::move(out));
}

}  // namespace adsem
