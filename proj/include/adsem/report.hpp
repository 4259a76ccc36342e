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
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "adsem/catalog.hpp"
#include "adsem/engine.hpp"
#include "adsem/simulator.hpp"

namespace adsem {

inline constexpr int kRecallKs[] = {5, 10, 50, 100, 200};
inline constexpr int kRecallListDepth = 200;

// Ranked list of one request seed plus ground-truth relevance of each entry.
struct SeedList {
  std::string seed_id;
  std::vector<std::string> ids;
  std::vector<char> relevant;  // parallel to ids
  std::size_t relevant_count = 0;

  bool operator==(const SeedList&) const = default;
};

// Everything `evaluate` needs from one simulated retriever.
struct RunRecord {
  RetrieverTag retriever = RetrieverTag::kSemantic;
  int days = 0;
  int requests_per_day = 0;
  int k = 0;
  std::uint64_t seed = 0;
  std::vector<PairDeliveryStats> pairs;
  std::vector<double> topline_revenue;
  std::vector<std::int64_t> topline_impressions;
  std::vector<SeedList> lists;
};

// Simulates delivery and records top-kRecallListDepth lists for every
// request seed.
RunRecord make_run_record(const AdCatalog& catalog, const Retriever& retriever, const SimulationConfig& config);

std::string run_record_to_json(const RunRecord& run);
RunRecord run_record_from_json(std::string_view text);
void save_run(const RunRecord& run, const std::string& path);
RunRecord load_run(const std::string& path);
// DIR/<retriever>.run.json
std::string run_path(const std::string& dir, RetrieverTag tag);

struct MetricReport {
  RetrieverTag retriever = RetrieverTag::kSemantic;
  std::optional<double> aggregate_stat_sig_diff;
  std::size_t used_pairs = 0;
  std::size_t undefined_pairs = 0;
  std::vector<std::optional<double>> daily_rel_diff_series;  // percent, one per day
  std::size_t undefined_days = 0;
  std::optional<double> mad;
  std::map<int, double> recall_at_k;  // mean over seeds with a non-empty relevant set
  // Against the baseline run; empty when no baseline run is present.
  std::map<int, double> alignment_ratio;
  std::map<int, double> incremental_recall;
  double topline_revenue = 0.0;
  std::int64_t topline_impressions = 0;
};

MetricReport compute_metrics(const RunRecord& run, const RunRecord* baseline = nullptr);

struct Evaluation {
  std::optional<MetricReport> semantic;
  std::optional<MetricReport> baseline;
  std::optional<RunRecord> semantic_run;
  std::optional<RunRecord> baseline_run;
};

Evaluation evaluate(std::optional<RunRecord> semantic, std::optional<RunRecord> baseline);

// Output file contents, keyed by file name.
std::map<std::string, std::string> render_outputs(const Evaluation& eval);

// Writes every file to a temporary name first and renames them into place
// once all writes succeeded; on failure nothing new is left in `dir`.
void write_outputs_atomically(const std::string& dir, const std::map<std::string, std::string>& files);

// Reads DIR/semantic.run.json and/or DIR/baseline.run.json (at least one).
Evaluation evaluate_directory(const std::string& runs_dir);

// Simulates both retrievers with identical settings, evaluates and writes
// report.csv, daily_series.csv, summary.json and daily_diff_plot.tsv.
Evaluation run_report(const AdCatalog& catalog, const Engine& semantic_engine, const Engine& baseline_engine,
                      SimulationConfig config, const std::string& out_dir);

}  // namespace adsem
