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

#include "adsem/report.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "adsem/error.hpp"
#include "adsem/metrics.hpp"
#include "json.hpp"

namespace adsem {

namespace fs = std::filesystem;
using json = nlohmann::json;

RunRecord make_run_record(const AdCatalog& catalog, const Retriever& retriever, const SimulationConfig& config) {
  SimulationResult sim = simulate_delivery(catalog, retriever, config);
  RunRecord run;
  run.retriever = retriever.tag;
  run.days = config.days;
  run.requests_per_day = config.requests_per_day;
  run.k = config.k;
  run.seed = config.seed;
  run.pairs = std::move(sim.pairs);
  run.topline_revenue = std::move(sim.topline_revenue);
  run.topline_impressions = std::move(sim.topline_impressions);

  std::vector<const Ad*> seeds;
  if (config.request_seeds.empty()) {
    seeds = catalog.primaries();
  } else {
    for (const auto& id : config.request_seeds) seeds.push_back(&catalog.at(id));
  }
  for (const Ad* seed : seeds) {
    const auto relevant = relevant_set(catalog, *seed);
    SeedList list;
    list.seed_id = seed->ad_id;
    list.ids = retriever.top_k(seed->ad_id, kRecallListDepth);
    for (const auto& id : list.ids) list.relevant.push_back(relevant.contains(id) ? 1 : 0);
    list.relevant_count = relevant.size();
    run.lists.push_back(std::move(list));
  }
  return run;
}

std::string run_record_to_json(const RunRecord& run) {
  json j;
  j["retriever"] = std::string(to_string(run.retriever));
  j["days"] = run.days;
  j["requests_per_day"] = run.requests_per_day;
  j["k"] = run.k;
  j["seed"] = run.seed;
  json pairs = json::array();
  for (const auto& p : run.pairs) {
    json days = json::array();
    for (const auto& d : p.days) {
      days.push_back({d.impressions_p, d.impressions_s, d.conversions_p, d.conversions_s, d.revenue_p, d.revenue_s});
    }
    pairs.push_back({{"primary_id", p.pair.primary_id},
                     {"shadow_id", p.pair.shadow_id},
                     {"perturbation", std::string(to_string(p.pair.perturbation))},
                     {"created_seed", p.pair.created_seed},
                     {"days", std::move(days)}});
  }
  j["pairs"] = std::move(pairs);
  j["topline_revenue"] = run.topline_revenue;
  j["topline_impressions"] = run.topline_impressions;
  json lists = json::array();
  for (const auto& l : run.lists) {
    json flags = json::array();
    for (char f : l.relevant) flags.push_back(f != 0 ? 1 : 0);
    lists.push_back({{"seed_id", l.seed_id}, {"ids", l.ids}, {"relevant", std::move(flags)},
                     {"relevant_count", l.relevant_count}});
  }
  j["lists"] = std::move(lists);
  return j.dump() + "\n";
}

RunRecord run_record_from_json(std::string_view text) {
  RunRecord run;
  try {
    const json j = json::parse(text);
    run.retriever = parse_retriever_tag(j.at("retriever").get<std::string>());
    run.days = j.at("days").get<int>();
    run.requests_per_day = j.at("requests_per_day").get<int>();
    run.k = j.at("k").get<int>();
    run.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& p : j.at("pairs")) {
      PairDeliveryStats stats;
      stats.pair.primary_id = p.at("primary_id").get<std::string>();
      stats.pair.shadow_id = p.at("shadow_id").get<std::string>();
      stats.pair.perturbation = parse_perturbation(p.at("perturbation").get<std::string>());
      stats.pair.created_seed = p.at("created_seed").get<std::uint64_t>();
      for (const auto& d : p.at("days")) {
        stats.days.push_back({d.at(0).get<std::int64_t>(), d.at(1).get<std::int64_t>(), d.at(2).get<std::int64_t>(),
                              d.at(3).get<std::int64_t>(), d.at(4).get<double>(), d.at(5).get<double>()});
      }
      if (stats.days.size() != static_cast<std::size_t>(run.days)) {
        throw Error(ErrorCode::kParse, "run file: pair " + stats.pair.primary_id + " has wrong day count");
      }
      run.pairs.push_back(std::move(stats));
    }
    run.topline_revenue = j.at("topline_revenue").get<std::vector<double>>();
    run.topline_impressions = j.at("topline_impressions").get<std::vector<std::int64_t>>();
    for (const auto& l : j.at("lists")) {
      SeedList list;
      list.seed_id = l.at("seed_id").get<std::string>();
      list.ids = l.at("ids").get<std::vector<std::string>>();
      for (const auto& f : l.at("relevant")) list.relevant.push_back(f.get<int>() != 0 ? 1 : 0);
      list.relevant_count = l.at("relevant_count").get<std::size_t>();
      if (list.relevant.size() != list.ids.size()) {
        throw Error(ErrorCode::kParse, "run file: relevance flags do not match list of " + list.seed_id);
      }
      run.lists.push_back(std::move(list));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("run file: ") + e.what());
  }
  return run;
}

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string fmt(const char* format, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, v);
  return buf;
}

std::string opt_fmt(const std::optional<double>& v, const char* format = "%.6f") {
  return v ? fmt(format, *v) : std::string();
}

json opt_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json k_map_json(const std::map<int, double>& m) {
  json j = json::object();
  for (const auto& [k, v] : m) j[std::to_string(k)] = v;
  return j;
}

json report_json(const MetricReport& r) {
  json series = json::array();
  for (const auto& v : r.daily_rel_diff_series) series.push_back(opt_json(v));
  return {{"aggregate_stat_sig_diff", opt_json(r.aggregate_stat_sig_diff)},
          {"used_pairs", r.used_pairs},
          {"undefined_pairs", r.undefined_pairs},
          {"daily_rel_diff_series", std::move(series)},
          {"undefined_days", r.undefined_days},
          {"mad", opt_json(r.mad)},
          {"recall_at_k", k_map_json(r.recall_at_k)},
          {"alignment_ratio", k_map_json(r.alignment_ratio)},
          {"incremental_recall", k_map_json(r.incremental_recall)},
          {"topline_revenue", r.topline_revenue},
          {"topline_impressions", r.topline_impressions}};
}

}  // namespace

void save_run(const RunRecord& run, const std::string& path) {
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  write_outputs_atomically(target.has_parent_path() ? target.parent_path().string() : ".",
                           {{target.filename().string(), run_record_to_json(run)}});
}

RunRecord load_run(const std::string& path) { return run_record_from_json(read_file(path)); }

std::string run_path(const std::string& dir, RetrieverTag tag) {
  return (fs::path(dir) / (std::string(to_string(tag)) + ".run.json")).string();
}

MetricReport compute_metrics(const RunRecord& run, const RunRecord* baseline) {
  MetricReport r;
  r.retriever = run.retriever;
  try {
    const AggregateStatSig agg = aggregate_stat_sig_diff(run.pairs);
    r.aggregate_stat_sig_diff = agg.value;
    r.used_pairs = agg.used_pairs;
    r.undefined_pairs = agg.undefined_pairs;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kUndefined) throw;
    for (const auto& p : run.pairs) {
      const DayRecord t = p.totals();
      if (t.conversions_p + t.conversions_s == 0) ++r.undefined_pairs;
    }
  }

  std::vector<double> defined;
  for (int d = 0; d < run.days; ++d) {
    const auto v = daily_rel_impression_diff(run.pairs, static_cast<std::size_t>(d));
    r.daily_rel_diff_series.push_back(v);
    if (v) {
      defined.push_back(*v);
    } else {
      ++r.undefined_days;
    }
  }
  if (!defined.empty()) r.mad = mad(defined);

  for (int k : kRecallKs) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& l : run.lists) {
      if (const auto v = recall_at_k(l.relevant, l.relevant_count, k)) {
        sum += *v;
        ++n;
      }
    }
    if (n > 0) r.recall_at_k[k] = sum / static_cast<double>(n);
  }

  if (baseline != nullptr) {
    std::map<std::string_view, const SeedList*> base_lists;
    for (const auto& l : baseline->lists) base_lists.emplace(l.seed_id, &l);
    for (int k : kRecallKs) {
      double align = 0.0, incr = 0.0;
      std::size_t n_align = 0, n_incr = 0;
      for (const auto& l : run.lists) {
        const auto it = base_lists.find(l.seed_id);
        if (it == base_lists.end()) continue;
        const AlignmentResult a = alignment_and_incremental(l.ids, l.relevant, it->second->ids, l.relevant_count, k);
        align += a.alignment_ratio;
        ++n_align;
        if (a.incremental_recall) {
          incr += *a.incremental_recall;
          ++n_incr;
        }
      }
      if (n_align > 0) r.alignment_ratio[k] = align / static_cast<double>(n_align);
      if (n_incr > 0) r.incremental_recall[k] = incr / static_cast<double>(n_incr);
    }
  }

  for (double v : run.topline_revenue) r.topline_revenue += v;
  for (auto v : run.topline_impressions) r.topline_impressions += v;
  return r;
}

Evaluation evaluate(std::optional<RunRecord> semantic, std::optional<RunRecord> baseline) {
  if (!semantic && !baseline) throw Error(ErrorCode::kInvalidArgument, "no run to evaluate");
  if (semantic && baseline && semantic->days != baseline->days) {
    throw Error(ErrorCode::kInvalidArgument, "semantic and baseline runs cover different day counts");
  }
  Evaluation eval;
  if (semantic) eval.semantic = compute_metrics(*semantic, baseline ? &*baseline : nullptr);
  if (baseline) eval.baseline = compute_metrics(*baseline);
  eval.semantic_run = std::move(semantic);
  eval.baseline_run = std::move(baseline);
  return eval;
}

std::map<std::string, std::string> render_outputs(const Evaluation& eval) {
  std::vector<std::pair<std::string, const RunRecord*>> runs;
  if (eval.semantic_run) runs.emplace_back("semantic", &*eval.semantic_run);
  if (eval.baseline_run) runs.emplace_back("baseline", &*eval.baseline_run);

  std::ostringstream csv;
  csv << "retriever,pair_id,shadow_id,perturbation,imp_p,imp_s,conv_p,conv_s,rev_p,rev_s,stat_sig_diff\n";
  for (const auto& [name, run] : runs) {
    for (const auto& p : run->pairs) {
      const DayRecord t = p.totals();
      csv << name << ',' << p.pair.primary_id << ',' << p.pair.shadow_id << ',' << to_string(p.pair.perturbation)
          << ',' << t.impressions_p << ',' << t.impressions_s << ',' << t.conversions_p << ',' << t.conversions_s
          << ',' << fmt("%.2f", t.revenue_p) << ',' << fmt("%.2f", t.revenue_s) << ','
          << opt_fmt(stat_sig_diff_pair(static_cast<double>(t.conversions_p), static_cast<double>(t.conversions_s)))
          << '\n';
    }
  }

  const std::size_t days = runs.front().second->days;
  std::ostringstream series, plot;
  series << "day";
  plot << "# day";
  for (const auto& [name, run] : runs) {
    series << ',' << name << "_rel_diff_pct";
    plot << '\t' << name;
  }
  series << '\n';
  plot << '\n';
  for (std::size_t d = 0; d < days; ++d) {
    series << d;
    plot << d;
    for (const auto* report : {eval.semantic ? &*eval.semantic : nullptr, eval.baseline ? &*eval.baseline : nullptr}) {
      if (report == nullptr) continue;
      const auto& v = report->daily_rel_diff_series[d];
      series << ',' << opt_fmt(v, "%.4f");
      plot << '\t' << (v ? fmt("%.4f", *v) : std::string("nan"));
    }
    series << '\n';
    plot << '\n';
  }

  json summary;
  if (eval.semantic) summary["semantic"] = report_json(*eval.semantic);
  if (eval.baseline) summary["baseline"] = report_json(*eval.baseline);
  const auto* first = runs.front().second;
  summary["config"] = {{"days", first->days},
                       {"requests_per_day", first->requests_per_day},
                       {"k", first->k},
                       {"seed", first->seed},
                       {"pairs", first->pairs.size()}};
  if (eval.semantic && eval.baseline) {
    json rel = json::object();
    const auto& s = *eval.semantic;
    const auto& b = *eval.baseline;
    rel["stat_sig_diff_reduction"] =
        s.aggregate_stat_sig_diff && b.aggregate_stat_sig_diff && *b.aggregate_stat_sig_diff > 0.0
            ? json(1.0 - *s.aggregate_stat_sig_diff / *b.aggregate_stat_sig_diff)
            : json(nullptr);
    rel["mad_ratio"] = s.mad && b.mad && *b.mad > 0.0 ? json(*s.mad / *b.mad) : json(nullptr);
    rel["topline_revenue_lift"] =
        b.topline_revenue > 0.0 ? json(s.topline_revenue / b.topline_revenue - 1.0) : json(nullptr);
    summary["relative"] = std::move(rel);
  }

  return {{"report.csv", csv.str()},
          {"daily_series.csv", series.str()},
          {"summary.json", summary.dump(2) + "\n"},
          {"daily_diff_plot.tsv", plot.str()}};
}

void write_outputs_atomically(const std::string& dir, const std::map<std::string, std::string>& files) {
  fs::create_directories(dir);
  std::vector<fs::path> temps;
  std::vector<fs::path> placed;
  try {
    for (const auto& [name, content] : files) {
      const fs::path tmp = fs::path(dir) / (name + ".partial");
      temps.push_back(tmp);
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) throw Error(ErrorCode::kIo, "cannot write " + tmp.string());
      out.write(content.data(), static_cast<std::streamsize>(content.size()));
      out.close();
      if (!out) throw Error(ErrorCode::kIo, "write failed: " + tmp.string());
    }
    for (const auto& [name, content] : files) {
      const fs::path tmp = fs::path(dir) / (name + ".partial");
      const fs::path dst = fs::path(dir) / name;
      fs::rename(tmp, dst);
      placed.push_back(dst);
    }
  } catch (...) {
    std::error_code ec;
    for (const auto& p : temps) fs::remove(p, ec);
    for (const auto& p : placed) fs::remove(p, ec);
    throw;
  }
}

Evaluation evaluate_directory(const std::string& runs_dir) {
  std::optional<RunRecord> semantic, baseline;
  if (fs::exists(run_path(runs_dir, RetrieverTag::kSemantic))) {
    semantic = load_run(run_path(runs_dir, RetrieverTag::kSemantic));
  }
  if (fs::exists(run_path(runs_dir, RetrieverTag::kBaseline))) {
    baseline = load_run(run_path(runs_dir, RetrieverTag::kBaseline));
  }
  if (!semantic && !baseline) throw Error(ErrorCode::kNotFound, "no *.run.json files in " + runs_dir);
  return evaluate(std::move(semantic), std::move(baseline));
}

Evaluation run_report(const AdCatalog& catalog, const Engine& semantic_engine, const Engine& baseline_engine,
                      SimulationConfig config, const std::string& out_dir) {
  config.retriever_tag = RetrieverTag::kSemantic;
  RunRecord semantic = make_run_record(catalog, make_retriever(semantic_engine, RetrieverTag::kSemantic), config);
  config.retriever_tag = RetrieverTag::kBaseline;
  RunRecord baseline = make_run_record(catalog, make_retriever(baseline_engine, RetrieverTag::kBaseline), config);
  Evaluation eval = evaluate(std::move(semantic), std::move(baseline));
  write_outputs_atomically(out_dir, render_outputs(eval));
  return eval;
}

}  // namespace adsem
