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

// adsem command-line front end.

#include <atomic>
#include <csignal>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "adsem/catalog.hpp"
#include "adsem/config_file.hpp"
#include "adsem/engine.hpp"
#include "adsem/error.hpp"
#include "adsem/extraction.hpp"
#include "adsem/llm_client.hpp"
#include "adsem/report.hpp"
#include "adsem/server.hpp"
#include "adsem/simulator.hpp"
#include "adsem/snapshot.hpp"
#include "adsem/taxonomy.hpp"

namespace fs = std::filesystem;
using namespace adsem;

namespace {

std::string taxonomy_sidecar(const std::string& catalog_path) { return catalog_path + ".taxonomy.tsv"; }

Taxonomy resolve_taxonomy(const std::string& explicit_path, const std::string& catalog_path) {
  if (!explicit_path.empty()) return Taxonomy::load(explicit_path);
  if (fs::exists(taxonomy_sidecar(catalog_path))) return Taxonomy::load(taxonomy_sidecar(catalog_path));
  return Taxonomy::builtin();
}

AdCatalog load_catalog_verbose(const std::string& path) {
  CatalogLoadReport report;
  AdCatalog catalog = load_catalog(path, &report);
  for (const auto& w : report.warnings) std::cerr << "warning: " << w << "\n";
  return catalog;
}

Server* g_server = nullptr;

void on_signal(int) {
  if (g_server != nullptr) g_server->stop();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Semantic ad candidate generation and A/A' predictability harness"};
  app.require_subcommand(1);

  // catalog
  auto* catalog_cmd = app.add_subcommand("catalog", "Generate or validate ad catalogs");
  catalog_cmd->require_subcommand(1);
  GeneratorConfig gen;
  std::uint64_t gen_seed = 1;
  std::string gen_out;
  auto* generate = catalog_cmd->add_subcommand("generate", "Write a synthetic catalog with shadow pairs");
  generate->add_option("--ads", gen.ads, "Number of primary ads")->capture_default_str();
  generate->add_option("--topics", gen.topics, "Number of latent topics")->capture_default_str();
  generate->add_option("--shadow-fraction", gen.shadow_fraction, "Fraction of ads given a shadow")->capture_default_str();
  generate->add_option("--seed", gen_seed, "Generator seed")->capture_default_str();
  generate->add_option("--out", gen_out, "Output catalog path")->required();
  std::string validate_path;
  auto* validate_cmd = catalog_cmd->add_subcommand("validate", "Check a catalog file");
  validate_cmd->add_option("path", validate_path, "Catalog path")->required();

  // extract
  auto* extract = app.add_subcommand("extract", "Extract semantic metadata for every ad");
  std::string ex_catalog, ex_mode = "rule", ex_out, ex_taxonomy;
  ExtractorConfig ex_config;
  int ex_timeout_ms = 10000;
  extract->add_option("--catalog", ex_catalog, "Catalog path")->required();
  extract->add_option("--mode", ex_mode, "rule or llm")->check(CLI::IsMember({"rule", "llm"}))->capture_default_str();
  extract->add_option("--out", ex_out, "Metadata output path")->required();
  extract->add_option("--taxonomy", ex_taxonomy, "Category keyword table (rule mode)");
  extract->add_option("--endpoint", ex_config.endpoint_url, "Extractor endpoint URL (llm mode)");
  extract->add_option("--prompt-template", ex_config.prompt_template_path, "Prompt template file (llm mode)");
  extract->add_option("--max-categories", ex_config.max_categories)->capture_default_str();
  extract->add_option("--batch-size", ex_config.batch_size)->capture_default_str();
  extract->add_option("--max-in-flight", ex_config.max_in_flight)->capture_default_str();
  extract->add_option("--timeout-ms", ex_timeout_ms)->capture_default_str();

  // build-index
  auto* build = app.add_subcommand("build-index", "Build index and graph into a snapshot");
  std::string bi_metadata, bi_out, bi_catalog, bi_config;
  build->add_option("--metadata", bi_metadata, "Metadata path")->required();
  build->add_option("--out", bi_out, "Snapshot output path")->required();
  build->add_option("--catalog", bi_catalog, "Catalog path; enables the baseline retriever");
  build->add_option("--config", bi_config, "Engine config file");
  std::optional<double> bi_threshold, bi_alpha, bi_theta;
  std::optional<int> bi_max_degree, bi_depth, bi_budget, bi_k;
  build->add_option("--edge-threshold", bi_threshold);
  build->add_option("--max-degree", bi_max_degree);
  build->add_option("--blend-alpha", bi_alpha);
  build->add_option("--theta", bi_theta);
  build->add_option("--depth", bi_depth);
  build->add_option("--stage1-budget", bi_budget);
  build->add_option("--k-default", bi_k);

  // retrieve
  auto* retrieve = app.add_subcommand("retrieve", "Retrieve candidates for one seed ad");
  std::string rt_snapshot, rt_seed;
  std::optional<int> rt_k;
  bool rt_baseline = false;
  retrieve->add_option("--snapshot", rt_snapshot)->required();
  retrieve->add_option("--seed", rt_seed)->required();
  retrieve->add_option("--k", rt_k);
  retrieve->add_flag("--baseline", rt_baseline, "Use the non-semantic baseline retriever");

  // serve
  auto* serve = app.add_subcommand("serve", "Serve retrieval over HTTP");
  ServerOptions sv;
  serve->add_option("--snapshot", sv.snapshot_path)->required();
  serve->add_option("--port", sv.port)->capture_default_str();
  serve->add_option("--host", sv.host)->capture_default_str();

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Simulate delivery for one retriever");
  std::string sim_catalog, sim_snapshot, sim_retriever = "semantic", sim_out;
  SimulationConfig sim;
  simulate->add_option("--catalog", sim_catalog)->required();
  simulate->add_option("--snapshot", sim_snapshot)->required();
  simulate->add_option("--retriever", sim_retriever)->check(CLI::IsMember({"semantic", "baseline"}))->capture_default_str();
  simulate->add_option("--days", sim.days)->capture_default_str();
  simulate->add_option("--rpd", sim.requests_per_day, "Requests per day")->capture_default_str();
  simulate->add_option("--k", sim.k)->capture_default_str();
  simulate->add_option("--seed", sim.seed)->capture_default_str();
  simulate->add_option("--out", sim_out, "Run directory")->required();

  // evaluate
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Compute metrics and reports from simulated runs");
  std::string ev_runs, ev_out;
  evaluate_cmd->add_option("--runs", ev_runs, "Directory holding *.run.json")->required();
  evaluate_cmd->add_option("--out", ev_out, "Report directory")->required();

  // report
  auto* report = app.add_subcommand("report", "Simulate both retrievers and write all reports");
  std::string rp_catalog, rp_snapshot, rp_baseline_snapshot, rp_out;
  SimulationConfig rp;
  report->add_option("--catalog", rp_catalog)->required();
  report->add_option("--snapshot", rp_snapshot)->required();
  report->add_option("--baseline-snapshot", rp_baseline_snapshot, "Defaults to --snapshot");
  report->add_option("--days", rp.days)->capture_default_str();
  report->add_option("--rpd", rp.requests_per_day)->capture_default_str();
  report->add_option("--k", rp.k)->capture_default_str();
  report->add_option("--seed", rp.seed)->capture_default_str();
  report->add_option("--out", rp_out)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (generate->parsed()) {
      const AdCatalog catalog = generate_synthetic_catalog(gen, gen_seed);
      save_catalog(catalog, gen_out);
      Taxonomy::with_topics(gen.topics).save(taxonomy_sidecar(gen_out));
      std::cout << "wrote " << catalog.size() << " ads (" << catalog.pairs().size() << " pairs) to " << gen_out
                << "\n";
    } else if (validate_cmd->parsed()) {
      const AdCatalog catalog = load_catalog_verbose(validate_path);
      std::cout << "ok: " << catalog.size() << " ads, " << catalog.pairs().size() << " pairs\n";
    } else if (extract->parsed()) {
      const AdCatalog catalog = load_catalog_verbose(ex_catalog);
      ex_config.timeout = std::chrono::milliseconds(ex_timeout_ms);
      std::vector<SemanticMetadata> metadata;
      if (ex_mode == "rule") {
        ex_config.mode = ExtractorMode::kRuleBased;
        metadata = extract_rule_based(catalog, resolve_taxonomy(ex_taxonomy, ex_catalog), ex_config);
      } else {
        ex_config.mode = ExtractorMode::kLlmEndpoint;
        int failures = 0;
        for (auto& outcome : extract_llm(catalog.ads(), ex_config)) {
          for (const auto& w : outcome.warnings) std::cerr << "warning: " << outcome.ad_id << ": " << w << "\n";
          if (outcome.metadata) {
            metadata.push_back(std::move(*outcome.metadata));
          } else {
            ++failures;
            std::cerr << "error: " << outcome.ad_id << ": " << outcome.error << "\n";
          }
        }
        if (failures > 0) std::cerr << failures << " ads failed extraction\n";
      }
      save_metadata(metadata, ex_out);
      std::cout << "wrote metadata for " << metadata.size() << " ads to " << ex_out << "\n";
    } else if (build->parsed()) {
      EngineConfig config;
      if (!bi_config.empty()) {
        for (const auto& w : apply_config(load_config(bi_config), config)) std::cerr << "warning: " << w << "\n";
      }
      if (bi_threshold) config.graph.edge_threshold = *bi_threshold;
      if (bi_max_degree) config.graph.max_degree = *bi_max_degree;
      if (bi_alpha) config.blend_alpha = *bi_alpha;
      if (bi_theta) config.similarity.theta = *bi_theta;
      if (bi_depth) config.depth = *bi_depth;
      if (bi_budget) config.stage1_budget = *bi_budget;
      if (bi_k) config.k_default = *bi_k;
      std::optional<AdCatalog> catalog;
      if (!bi_catalog.empty()) catalog = load_catalog_verbose(bi_catalog);
      const EngineState state = build_engine_state(load_metadata(bi_metadata), config, catalog ? &*catalog : nullptr);
      snapshot_save(state, bi_out);
      std::cout << "wrote snapshot of " << state.index.ad_ids.size() << " ads, " << state.graph.edges.size()
                << " directed edges to " << bi_out << "\n";
    } else if (retrieve->parsed()) {
      const Engine engine(snapshot_load(rt_snapshot));
      const int k = rt_k.value_or(engine.config().k_default);
      const auto tag = rt_baseline ? RetrieverTag::kBaseline : RetrieverTag::kSemantic;
      std::cout << to_json(engine.retrieve_with(tag, rt_seed, k)) << "\n";
    } else if (serve->parsed()) {
      Server server(sv);
      const int port = server.bind();
      g_server = &server;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      std::cerr << "listening on " << sv.host << ":" << port << "\n";
      std::atomic<bool> finished{false};
      std::jthread http([&server, &finished] {
        server.listen();
        finished = true;
      });
      try {
        while (!server.wait_until_loaded(std::chrono::milliseconds(200))) {
        }
        std::cerr << "snapshot loaded: " << server.current()->content_hash << "\n";
      } catch (const Error& e) {
        std::cerr << "error: snapshot load failed: " << e.what() << "\n";
        while (!finished) {
          server.stop();
          std::this_thread::sleep_for(std::chrono::milliseconds(10));
        }
        g_server = nullptr;
        return 1;
      }
    } else if (simulate->parsed()) {
      const AdCatalog catalog = load_catalog_verbose(sim_catalog);
      const Engine engine(snapshot_load(sim_snapshot));
      sim.retriever_tag = parse_retriever_tag(sim_retriever);
      const RunRecord run = make_run_record(catalog, make_retriever(engine, sim.retriever_tag), sim);
      save_run(run, run_path(sim_out, sim.retriever_tag));
      std::cout << "wrote " << run_path(sim_out, sim.retriever_tag) << "\n";
    } else if (evaluate_cmd->parsed()) {
      const Evaluation eval = evaluate_directory(ev_runs);
      write_outputs_atomically(ev_out, render_outputs(eval));
      std::cout << "wrote reports to " << ev_out << "\n";
    } else if (report->parsed()) {
      const AdCatalog catalog = load_catalog_verbose(rp_catalog);
      const Engine semantic(snapshot_load(rp_snapshot));
      const std::optional<Engine> separate_baseline =
          rp_baseline_snapshot.empty() ? std::nullopt : std::optional<Engine>(snapshot_load(rp_baseline_snapshot));
      const Evaluation eval =
          run_report(catalog, semantic, separate_baseline ? *separate_baseline : semantic, rp, rp_out);
      if (eval.semantic && eval.baseline && eval.semantic->aggregate_stat_sig_diff &&
          eval.baseline->aggregate_stat_sig_diff) {
        std::cout << "StatSigDiff semantic=" << *eval.semantic->aggregate_stat_sig_diff
                  << " baseline=" << *eval.baseline->aggregate_stat_sig_diff << "\n";
      }
      std::cout << "wrote reports to " << rp_out << "\n";
    }
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.code()) << "): " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
