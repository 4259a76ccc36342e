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

// Acceptance run: prints one PASS/FAIL line per criterion.
//
// Exit status is nonzero when a criterion fails that is not listed in
// kKnownGaps. Known gaps still print FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "adsem/catalog.hpp"
#include "adsem/engine.hpp"
#include "adsem/error.hpp"
#include "adsem/metrics.hpp"
#include "adsem/report.hpp"
#include "adsem/server.hpp"
#include "adsem/simulator.hpp"
#include "adsem/snapshot.hpp"
#include "adsem/taxonomy.hpp"
#include "engine_oracle.hpp"
#include "graph_oracle.hpp"
#include "httplib.h"
#include "support.hpp"

using namespace adsem;
using Clock = std::chrono::steady_clock;

namespace {

// Criteria that fail at desk scale for documented reasons (README, "Known gaps").
const std::set<int> kKnownGaps = {8};

struct Outcome {
  bool pass = false;
  std::string detail;
};

int unexpected_failures = 0;

void report(int id, const std::string& name, const std::function<Outcome()>& check) {
  const auto t0 = Clock::now();
  Outcome o;
  try {
    o = check();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  const bool known = !o.pass && kKnownGaps.contains(id);
  if (!o.pass && !known) ++unexpected_failures;
  std::ostringstream line;
  line << (o.pass ? "PASS" : "FAIL") << " C" << id << " " << name << ": " << o.detail;
  line.precision(2);
  line << std::fixed << " (" << secs << " s)";
  if (known) line << " [known gap]";
  std::cout << line.str() << std::endl;
}

std::string fmt(double v, int digits = 4) {
  std::ostringstream s;
  s.precision(digits);
  s << v;
  return s.str();
}

bool close_rel(double got, double want, double tol = 1e-9) {
  if (want == 0.0) return std::abs(got) <= tol;
  return std::abs(got - want) <= tol * std::abs(want);
}

struct World {
  AdCatalog catalog;
  std::unique_ptr<Engine> engine;
};

World make_world(GeneratorConfig gen, std::uint64_t seed) {
  World w;
  w.catalog = generate_synthetic_catalog(gen, seed);
  auto meta = extract_rule_based(w.catalog, Taxonomy::with_topics(gen.topics));
  w.engine = std::make_unique<Engine>(build_engine_state(std::move(meta), {}, &w.catalog));
  return w;
}

SimulationConfig full_config(std::uint64_t seed) {
  SimulationConfig c;
  c.days = 14;
  c.requests_per_day = 5000;
  c.k = 100;
  c.seed = seed;
  return c;
}

// --- 1 ---------------------------------------------------------------------

Outcome metric_math() {
  std::vector<std::string> bad;
  auto expect = [&](const std::string& what, double got, double want) {
    if (!close_rel(got, want)) bad.push_back(what + " got " + fmt(got, 12) + " want " + fmt(want, 12));
  };
  expect("pair(100,100)", *stat_sig_diff_pair(100, 100), 0.0);
  expect("pair(150,50)", *stat_sig_diff_pair(150, 50), 1.0 - 0.165);
  expect("pair(3,2)", *stat_sig_diff_pair(3, 2), 0.0);
  const std::vector<PairValue> equal{{0.2, 50, 50}, {0.4, 50, 50}};
  expect("aggregate equal weights", aggregate_stat_sig_diff(equal).value, 0.3);
  const std::vector<PairValue> weighted{{0.2, 60, 40}, {0.0, 200, 200}};
  expect("aggregate weighted", aggregate_stat_sig_diff(weighted).value, (0.2 * 10 + 0.0 * 20) / 30.0);
  const std::vector<PairValue> single{{0.55, 1, 2}};
  expect("aggregate single", aggregate_stat_sig_diff(single).value, 0.55);

  auto day_stats = [](std::int64_t p, std::int64_t s) {
    PairDeliveryStats st;
    DayRecord d;
    d.impressions_p = p;
    d.impressions_s = s;
    st.days = {d};
    return std::vector<PairDeliveryStats>{st};
  };
  expect("rel diff (1000,1000)", *daily_rel_impression_diff(day_stats(1000, 1000), 0), 0.0);
  expect("rel diff (1100,1000)", *daily_rel_impression_diff(day_stats(1100, 1000), 0), 10.0);
  expect("rel diff (900,1000)", *daily_rel_impression_diff(day_stats(900, 1000), 0), -10.0);

  const std::vector<double> series{1, 2, 3, 10}, flat{5, 5, 5}, one{3};
  expect("mad [1,2,3,10]", mad(series), 1.0);
  expect("mad constant", mad(flat), 0.0);
  expect("mad single", mad(one), 0.0);
  if (bad.empty()) return {true, "12 hand examples within 1e-9 relative"};
  std::string d;
  for (const auto& b : bad) d += b + "; ";
  return {false, d};
}

// --- 2 ---------------------------------------------------------------------

Outcome statsig_invariants() {
  std::mt19937_64 rng(2026);
  std::uniform_int_distribution<int> conv(0, 5000);
  std::uniform_int_distribution<int> scale(2, 10);
  int violations = 0;
  for (int i = 0; i < 10000; ++i) {
    const double p = conv(rng), s = conv(rng);
    if (p + s == 0) continue;
    const double v = *stat_sig_diff_pair(p, s);
    if (v < 0.0) ++violations;
    if (v != *stat_sig_diff_pair(s, p)) ++violations;
    if (*stat_sig_diff_pair(p, p == 0 ? 1 : p) != 0.0 && p > 0) ++violations;
    // Same delta with more conversions: the bound shrinks.
    const double c = scale(rng);
    if (*stat_sig_diff_pair(c * p, c * s) < v) ++violations;
  }
  return {violations == 0, "10000 random pairs, " + std::to_string(violations) + " violations"};
}

// --- 3 ---------------------------------------------------------------------

Outcome retrieval_oracle() {
  const World w = make_world({.ads = 50, .topics = 6}, 31);
  const auto& ids = w.engine->state().index.ad_ids;
  std::mt19937_64 rng(7);
  int mismatches = 0;
  for (int i = 0; i < 20; ++i) {
    const std::string& seed = ids[rng() % ids.size()];
    for (int k : {10, 100}) {
      if (w.engine->retrieve(seed, k).items != testing::reference_retrieve(*w.engine, seed, k)) ++mismatches;
      if (w.engine->baseline_retrieve(seed, k).items != testing::reference_baseline(w.catalog, seed, k)) ++mismatches;
    }
  }
  return {mismatches == 0, "20 seeds x 2 retrievers x k in {10,100} on " + std::to_string(ids.size()) +
                               " ads, " + std::to_string(mismatches) + " mismatches"};
}

// --- 4 ---------------------------------------------------------------------

Outcome graph_oracle() {
  int mismatches = 0;
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const AdCatalog catalog = generate_synthetic_catalog({.ads = 90, .topics = 8}, seed);
    auto meta = extract_rule_based(catalog, Taxonomy::with_topics(8));
    std::sort(meta.begin(), meta.end(), [](const auto& a, const auto& b) { return a.ad_id < b.ad_id; });
    const CategoryIndex index = build_index(meta);
    for (GraphParams params : {GraphParams{}, GraphParams{0.0, 3}, GraphParams{0.3, 1}}) {
      if (build_graph(index, meta, params) != testing::naive_graph(meta, params)) ++mismatches;
    }
  }
  // Chain a-b 0.9, b-c 0.8, plus a 5-node graph with a capped weight and a longer detour.
  const auto chain = testing::graph_from_edges(3, {{0, 1, 0.9}, {1, 2, 0.8}});
  const NodeId seed0[] = {0};
  const auto c = expand(seed0, chain, 2, 10);
  const bool chain_ok = c.size() == 2 && c[0] == Expansion{1, 0.9, 1} && close_rel(c[1].path_weight, 0.72, 1e-12) &&
                        c[1].hops == 2;
  const auto five =
      testing::graph_from_edges(5, {{0, 1, 1.5}, {1, 2, 1.0}, {0, 2, 0.4}, {0, 3, 0.6}, {3, 4, 0.9}, {2, 4, 0.2}});
  const auto f = expand(seed0, five, 3, 10);
  const bool five_ok = f.size() == 4 && f[0] == Expansion{1, 1.0, 1} && f[1] == Expansion{2, 1.0, 2} &&
                       f[2] == Expansion{3, 0.6, 1} && f[3].node == 4 && close_rel(f[3].path_weight, 0.54, 1e-12) &&
                       f[3].hops == 2;
  return {mismatches == 0 && chain_ok && five_ok,
          "9 graphs vs all-pairs: " + std::to_string(mismatches) + " mismatches; chain 0.72 " +
              (chain_ok ? "ok" : "wrong") + "; 5-node " + (five_ok ? "ok" : "wrong")};
}

// --- 5, 6, 8 ----------------------------------------------------------------

struct SeedRun {
  std::uint64_t seed;
  MetricReport semantic, baseline;
};

std::vector<SeedRun> predictability_runs() {
  std::vector<SeedRun> runs;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const World w = make_world({}, seed);
    const auto cfg = full_config(seed);
    const RunRecord sem = make_run_record(w.catalog, make_retriever(*w.engine, RetrieverTag::kSemantic), cfg);
    const RunRecord base = make_run_record(w.catalog, make_retriever(*w.engine, RetrieverTag::kBaseline), cfg);
    runs.push_back({seed, compute_metrics(sem, &base), compute_metrics(base)});
  }
  return runs;
}

Outcome statsig_direction(const std::vector<SeedRun>& runs) {
  bool ok = runs.size() == 5;
  std::string d;
  for (const auto& r : runs) {
    const double s = r.semantic.aggregate_stat_sig_diff.value_or(NAN);
    const double b = r.baseline.aggregate_stat_sig_diff.value_or(NAN);
    const double reduction = 1.0 - s / b;
    ok = ok && s < b && reduction >= 0.25;
    d += "seed " + std::to_string(r.seed) + " " + fmt(s) + " vs " + fmt(b) + " (-" + fmt(100 * reduction, 3) + "%); ";
  }
  return {ok, d};
}

Outcome mad_direction(const std::vector<SeedRun>& runs) {
  int hits = 0;
  std::string d;
  for (const auto& r : runs) {
    const double s = r.semantic.mad.value_or(NAN), b = r.baseline.mad.value_or(NAN);
    if (s <= 0.6 * b) ++hits;
    d += "seed " + std::to_string(r.seed) + " " + fmt(s) + " vs " + fmt(b) + "; ";
  }
  return {hits >= 4, std::to_string(hits) + "/5 seeds with ratio <= 0.6: " + d};
}

Outcome recall_alignment_shape(const std::vector<SeedRun>& runs) {
  const MetricReport& m = runs.front().semantic;
  bool align_ok = true, incr_ok = true;
  std::string a, inc;
  double prev_a = 2.0, prev_i = -1.0;
  for (int k : kRecallKs) {
    const double ar = m.alignment_ratio.at(k), ir = m.incremental_recall.at(k);
    align_ok = align_ok && ar <= prev_a;
    incr_ok = incr_ok && ir >= prev_i;
    prev_a = ar;
    prev_i = ir;
    a += fmt(ar, 3) + " ";
    inc += fmt(ir, 3) + " ";
  }
  return {align_ok && incr_ok, std::string("seed 1, k=5..200: alignment ") + a + (align_ok ? "(non-increasing)" : "(NOT non-increasing)") +
                                   "; incremental " + inc + (incr_ok ? "(non-decreasing)" : "(NOT non-decreasing)")};
}

// --- 7 ---------------------------------------------------------------------

Outcome exact_copy() {
  GeneratorConfig gen;
  gen.perturbations = {Perturbation::kIdOnly};
  const World w = make_world(gen, 1);
  const auto& pairs = w.catalog.pairs();

  // Lists agree once the counterpart is written under a shared name.
  int identical = 0;
  double min_jaccard = 1.0;
  for (const auto& pair : pairs) {
    auto canon = [&](const RankedCandidates& c) {
      std::vector<std::string> out;
      for (const auto& item : c.items) {
        out.push_back(item.ad_id == pair.primary_id || item.ad_id == pair.shadow_id ? "<pair>" : item.ad_id);
      }
      return out;
    };
    const auto p = canon(w.engine->retrieve(pair.primary_id, 100));
    const auto s = canon(w.engine->retrieve(pair.shadow_id, 100));
    const std::set<std::string> ps(p.begin(), p.end()), ss(s.begin(), s.end());
    std::size_t inter = 0;
    for (const auto& id : ps) inter += ss.count(id);
    const double j = static_cast<double>(inter) / static_cast<double>(ps.size() + ss.size() - inter);
    min_jaccard = std::min(min_jaccard, j);
    if (p == s) ++identical;
  }

  // Seeds that show exactly one member of a pair: only possible when the
  // pair's tied scores straddle the rank-k cut.
  std::unordered_map<std::string, std::size_t> pair_of;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    pair_of[pairs[i].primary_id] = i;
    pair_of[pairs[i].shadow_id] = i;
  }
  int split = 0;
  for (const Ad* seed : w.catalog.primaries()) {
    std::vector<int> seen(pairs.size(), 0);
    for (const auto& id : w.engine->retrieve(seed->ad_id, 100).ids()) {
      if (auto it = pair_of.find(id); it != pair_of.end()) ++seen[it->second];
    }
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      const bool member = pairs[i].primary_id == seed->ad_id;
      if (!member && seen[i] == 1) ++split;
    }
  }

  // Remaining differences should be conversion draws alone. Each pair gives
  // z = (c_p - c_s) / sqrt(c_p + c_s), roughly standard normal under pure
  // sampling noise, so mean z^2 must sit inside the two-sided 99.9% band of
  // chi-square(n) / n (Wilson-Hilferty approximation).
  const RunRecord run = make_run_record(w.catalog, make_retriever(*w.engine, RetrieverTag::kSemantic), full_config(1));
  double z2 = 0.0;
  int n = 0, significant = 0;
  std::int64_t imp_gap = 0, imp_total = 0;
  for (const auto& p : run.pairs) {
    const auto t = p.totals();
    imp_gap += std::abs(t.impressions_p - t.impressions_s);
    imp_total += t.impressions_p + t.impressions_s;
    const double cp = static_cast<double>(t.conversions_p), cs = static_cast<double>(t.conversions_s);
    if (cp + cs == 0) continue;
    z2 += (cp - cs) * (cp - cs) / (cp + cs);
    ++n;
    significant += *stat_sig_diff_pair(cp, cs) > 0.0;
  }
  const auto chi2_quantile = [](double dof, double z) {
    const double a = 2.0 / (9.0 * dof);
    return dof * std::pow(1.0 - a + z * std::sqrt(a), 3);
  };
  const double mean_z2 = n ? z2 / n : NAN;
  const double lo = chi2_quantile(n, -3.29) / n, hi = chi2_quantile(n, 3.29) / n;
  // Share past the bound expected from noise alone: P(|Z| > 1.65 / sqrt(2)).
  const double expected_share = std::erfc(1.65 / std::sqrt(2.0) / std::sqrt(2.0));
  const bool noise_only = n > 0 && mean_z2 >= lo && mean_z2 <= hi;
  const bool ok = identical == static_cast<int>(pairs.size()) && min_jaccard == 1.0 && noise_only;
  return {ok, std::to_string(identical) + "/" + std::to_string(pairs.size()) +
                  " pairs with identical top-100 (min Jaccard " + fmt(min_jaccard) + "); mean z^2 " + fmt(mean_z2, 3) +
                  " in [" + fmt(lo, 3) + ", " + fmt(hi, 3) + "]: " + (noise_only ? "noise-consistent" : "NOT noise-consistent") +
                  "; " + std::to_string(significant) + "/" + std::to_string(n) + " pairs past the bound (noise alone: " +
                  fmt(100 * expected_share, 3) + "%); impression gap " + fmt(100.0 * imp_gap / imp_total, 3) + "% from " +
                  std::to_string(split) + " rank-100 tie splits and seed self-exclusion"};
}

// --- 9 ---------------------------------------------------------------------

Outcome service_contract() {
  testing::TempDir dir;
  {
    const World w = make_world({.ads = 10000}, 9);
    snapshot_save(w.engine->state(), dir.file("big.snap"));
  }
  Server server({.snapshot_path = dir.file("big.snap"), .port = 0});
  const int port = server.bind();
  std::jthread listener([&] { server.listen(); });
  if (!server.wait_until_loaded(std::chrono::seconds(120))) return {false, "snapshot did not load"};
  httplib::Client client("127.0.0.1", port);
  client.set_keep_alive(true);
  for (int i = 0; i < 200 && !client.Get("/health"); ++i) std::this_thread::sleep_for(std::chrono::milliseconds(10));

  const auto snap = server.current();
  const auto& ids = snap->engine.state().index.ad_ids;
  std::vector<double> ms;
  int non2xx = 0, drift = 0;
  std::vector<std::string> first_bodies;
  for (int i = 0; i < 1000; ++i) {
    const std::string& seed = ids[(static_cast<std::size_t>(i) * 7919) % 250 * 37 % ids.size()];
    const auto t0 = Clock::now();
    auto res = client.Get("/retrieve?seed=" + seed + "&k=100");
    ms.push_back(std::chrono::duration<double, std::milli>(Clock::now() - t0).count());
    if (!res || res->status / 100 != 2) {
      ++non2xx;
      continue;
    }
    if (i < 250) {
      first_bodies.push_back(res->body);
      if (res->body != to_json(snap->engine.retrieve(seed, 100))) ++drift;
    } else if (res->body != first_bodies[static_cast<std::size_t>(i % 250)]) {
      ++drift;
    }
  }
  server.stop();
  std::sort(ms.begin(), ms.end());
  const double p50 = ms[ms.size() / 2], p99 = ms[ms.size() * 99 / 100];
  return {non2xx == 0 && drift == 0 && p50 < 10.0,
          std::to_string(ids.size()) + " ads, 1000 requests: " + std::to_string(non2xx) + " non-2xx, " +
              std::to_string(drift) + " payload mismatches, p50 " + fmt(p50, 3) + " ms, p99 " + fmt(p99, 3) + " ms"};
}

// --- 10 --------------------------------------------------------------------

Outcome round_trip() {
  testing::TempDir dir;
  const World w = make_world({}, 1);
  snapshot_save(w.engine->state(), dir.file("s.snap"));
  const Engine loaded(snapshot_load(dir.file("s.snap")));
  const auto& ids = w.engine->state().index.ad_ids;
  int differ = 0;
  for (int i = 0; i < 100; ++i) {
    const std::string& seed = ids[static_cast<std::size_t>(i) * 11 % ids.size()];
    if (to_json(w.engine->retrieve(seed, 100)) != to_json(loaded.retrieve(seed, 100))) ++differ;
    if (to_json(w.engine->baseline_retrieve(seed, 100)) != to_json(loaded.baseline_retrieve(seed, 100))) ++differ;
  }
  run_report(w.catalog, *w.engine, *w.engine, full_config(1), dir.file("a"));
  run_report(w.catalog, loaded, loaded, full_config(1), dir.file("b"));
  const std::string a = testing::read_text(dir.file("a/summary.json"));
  const std::string b = testing::read_text(dir.file("b/summary.json"));
  const bool same = !a.empty() && a == b;
  return {differ == 0 && same, "100 seeds x 2 retrievers: " + std::to_string(differ) +
                                   " differing payloads; summary.json " + (same ? "byte-identical" : "DIFFERS") + " (" +
                                   std::to_string(a.size()) + " bytes)"};
}

}  // namespace

int main() {
  report(1, "metric-math exactness", metric_math);
  report(2, "stat-sig invariants", statsig_invariants);
  report(3, "retrieval oracle equivalence", retrieval_oracle);
  report(4, "graph oracle equivalence", graph_oracle);

  std::vector<SeedRun> runs;
  const auto t0 = Clock::now();
  try {
    runs = predictability_runs();
  } catch (const std::exception& e) {
    std::cout << "predictability runs failed: " << e.what() << std::endl;
  }
  const double run_secs = std::chrono::duration<double>(Clock::now() - t0).count();
  report(5, "predictability direction", [&] {
    auto o = statsig_direction(runs);
    o.detail += "5 seeds simulated in " + fmt(run_secs, 3) + " s";
    if (run_secs >= 300.0) o.pass = false;
    return o;
  });
  report(6, "MAD direction", [&] { return mad_direction(runs); });
  report(7, "exact-copy predictability", exact_copy);
  report(8, "recall-alignment shape", [&] {
    if (runs.empty()) return Outcome{false, "no runs"};
    return recall_alignment_shape(runs);
  });
  report(9, "service contract", service_contract);
  report(10, "round trip and determinism", round_trip);
  return unexpected_failures == 0 ? 0 : 1;
}
