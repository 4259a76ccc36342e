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

#include <atomic>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <utility>

#include "adsem/catalog.hpp"
#include "adsem/extraction.hpp"

namespace adsem::testing {

inline SemanticMetadata make_meta(std::string id, std::map<std::string, double> categories,
                                  StringSet brand = {}, StringSet product = {}, StringSet contextual = {}) {
  SemanticMetadata m;
  m.ad_id = std::move(id);
  m.categories = std::move(categories);
  m.brand_attrs = std::move(brand);
  m.product_attrs = std::move(product);
  m.contextual_attrs = std::move(contextual);
  m.low_coverage = m.categories.empty();
  return m;
}

inline Ad make_ad(std::string id, std::string title, std::string description = "A plain description.",
                  std::string advertiser = "adv-1") {
  Ad ad;
  ad.ad_id = std::move(id);
  ad.title = std::move(title);
  ad.description = std::move(description);
  ad.advertiser_id = std::move(advertiser);
  ad.latent_topics = {"topic"};
  ad.true_conversion_rate = 0.05;
  ad.base_revenue_per_conversion = 10.0;
  return ad;
}

// Scratch directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("adsem_test_" + std::to_string(rd()) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::string file(const std::string& name) const { return (path_ / name).string(); }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace adsem::testing
