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

#include "catch_amalgamated.hpp"

#include <filesystem>

#include "adsem/catalog.hpp"
#include "adsem/error.hpp"
#include "adsem/report.hpp"
#include "adsem/taxonomy.hpp"
#include "json.hpp"
#include "support.hpp"

using namespace adsem;
using adsem::testing::read_text;
using adsem::testing::TempDir;

namespace {

struct World {
  AdCatalog catalog;
  Engine engine;
};

World make_world() {
  AdCatalog catalog = generate_synthetic_catalog({.ads = 150}, 3);
  Engine engine(build_engine_state(extract_rule_based(catalog, Taxonomy::with_topics(20)), {}, &catalog));
  return {std::move(catalog), std::move(engine)};
}

SimulationConfig small_config() {
  SimulationConfig c;
  c.days = 4;
  c.requests_per_day = 300;
  c.k = 20;
  return c;
}

}  // namespace

TEST_CASE("run record json round trip", "[report]") {
  const World w = make_world();
  const RunRecord run = make_run_record(w.catalog, make_retriever(w.engine, RetrieverTag::kSemantic), small_config());
  CHECK(run.lists.size() == w.catalog.primaries().size());
  for (const auto& l : run.lists) {
    CHECK(l.ids.size() <= static_cast<std::size_t>(kRecallListDepth));
    CHECK(l.relevant.size() == l.ids.size());
  }
  const RunRecord back = run_record_from_json(run_record_to_json(run));
  CHECK(back.pairs == run.pairs);
  CHECK(back.lists == run.lists);
  CHECK(back.topline_revenue == run.topline_revenue);
  CHECK(run_record_to_json(back) == run_record_to_json(run));
  CHECK_THROWS_AS(run_record_from_json("{\"retriever\": 4}"), Error);
}

TEST_CASE("metrics from a run", "[report]") {
  const World w = make_world();
  const auto cfg = small_config();
  const RunRecord sem = make_run_record(w.catalog, make_retriever(w.engine, RetrieverTag::kSemantic), cfg);
  const RunRecord base = make_run_record(w.catalog, make_retriever(w.engine, RetrieverTag::kBaseline), cfg);
  const MetricReport m = compute_metrics(sem, &base);
  CHECK(m.daily_rel_diff_series.size() == 4);
  CHECK(m.recall_at_k.size() == std::size(kRecallKs));
  CHECK(m.alignment_ratio.size() == std::size(kRecallKs));
  double prev = 0.0;
  for (int k : kRecallKs) {
    CHECK(m.recall_at_k.at(k) >= prev);
    prev = m.recall_at_k.at(k);
    CHECK(m.alignment_ratio.at(k) >= 0.0);
    CHECK(m.alignment_ratio.at(k) <= 1.0);
  }
  CHECK(compute_metrics(sem).alignment_ratio.empty());
  CHECK(compute_metrics(base, &base).alignment_ratio.at(5) == 1.0);
}

TEST_CASE("report outputs are deterministic", "[report]") {
  const World w = make_world();
  TempDir a, b;
  run_report(w.catalog, w.engine, w.engine, small_config(), a.path().string());
  run_report(w.catalog, w.engine, w.engine, small_config(), b.path().string());
  for (const char* name : {"report.csv", "daily_series.csv", "summary.json", "daily_diff_plot.tsv"}) {
    INFO(name);
    REQUIRE(std::filesystem::exists(a.path() / name));
    CHECK(read_text(a.file(name)) == read_text(b.file(name)));
  }
  const auto summary = nlohmann::json::parse(read_text(a.file("summary.json")));
  CHECK(summary.contains("semantic"));
  CHECK(summary.contains("baseline"));
  CHECK(summary.contains("relative"));
  const std::string csv = read_text(a.file("report.csv"));
  CHECK(csv.starts_with("retriever,pair_id,shadow_id,perturbation,imp_p,imp_s,conv_p,conv_s,rev_p,rev_s,stat_sig_diff\n"));
}

TEST_CASE("evaluate reads run files from a directory", "[report]") {
  const World w = make_world();
  TempDir runs;
  CHECK_THROWS_MATCHES(evaluate_directory(runs.path().string()), Error,
                       Catch::Matchers::Predicate<Error>([](const Error& e) { return e.code() == ErrorCode::kNotFound; }));
  const RunRecord sem = make_run_record(w.catalog, make_retriever(w.engine, RetrieverTag::kSemantic), small_config());
  save_run(sem, run_path(runs.path().string(), RetrieverTag::kSemantic));
  const Evaluation only = evaluate_directory(runs.path().string());
  CHECK(only.semantic);
  CHECK_FALSE(only.baseline);
  CHECK(only.semantic->alignment_ratio.empty());
  const auto files = render_outputs(only);
  CHECK(files.contains("summary.json"));
}

TEST_CASE("failed writes leave no partial outputs", "[report]") {
  TempDir dir;
  // A directory squatting on the temporary name makes the last write fail.
  std::filesystem::create_directories(dir.path() / "summary.json.partial" / "x");
  const std::map<std::string, std::string> files{
      {"a.csv", "1"}, {"b.csv", "2"}, {"summary.json", "{}"}};
  CHECK_THROWS_AS(write_outputs_atomically(dir.path().string(), files), Error);
  CHECK_FALSE(std::filesystem::exists(dir.path() / "a.csv"));
  CHECK_FALSE(std::filesystem::exists(dir.path() / "a.csv.partial"));
  CHECK_FALSE(std::filesystem::exists(dir.path() / "b.csv.partial"));
  CHECK_FALSE(std::filesystem::exists(dir.path() / "summary.json"));

  TempDir ok;
  write_outputs_atomically(ok.path().string(), files);
  CHECK(read_text(ok.file("b.csv")) == "2");
  CHECK_FALSE(std::filesystem::exists(ok.path() / "b.csv.partial"));
}
