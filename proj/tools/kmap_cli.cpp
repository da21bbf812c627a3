// kmap command line: ingest, rank, serve, simulate.

#include <CLI11.hpp>

#include <csignal>
#include <fstream>
#include <iomanip>
#include <iostream>

#include "kmap/error.hpp"
#include "kmap/ingest.hpp"
#include "kmap/rank.hpp"
#include "kmap/service.hpp"
#include "kmap/session.hpp"
#include "kmap/simulate.hpp"

namespace {

kmap::json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw kmap::IoError("cannot open '" + path + "'");
  try {
    return kmap::json::parse(in);
  } catch (const kmap::json::parse_error& e) {
    throw kmap::ParseError(path, 0, e.what());
  }
}

kmap::Service* g_service = nullptr;

void on_signal(int) {
  if (g_service) g_service->stop();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Knowledge-map engine: build a biomedical knowledge graph and rank by proximity"};
  app.require_subcommand(1);

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Build and persist a knowledge graph");
  std::string docs_path, lexicon_path, relations_path, out_dir;
  ingest->add_option("--docs", docs_path, "Documents (JSON Lines)")->required();
  ingest->add_option("--lexicon", lexicon_path, "Lexicon (TSV)")->required();
  ingest->add_option("--relations", relations_path, "Curated relations (TSV)");
  ingest->add_option("--out", out_dir, "Output graph directory")->required();

  // rank
  auto* rank = app.add_subcommand("rank", "Rank items against a knowledge map");
  std::string graph_dir, map_path, query, kind_text;
  int top_k = 0;
  rank->add_option("--graph", graph_dir, "Graph directory")->required();
  rank->add_option("--map", map_path, "Map file (JSON)")->required();
  rank->add_option("--query", query, "Query text (default: none, rank from the map alone)");
  rank->add_option("--kind", kind_text, "publication | clinical_trial | entity")
      ->required()
      ->check(CLI::IsMember({"publication", "clinical_trial", "entity"}));
  rank->add_option("--top-k", top_k, "Number of results");

  // serve
  auto* serve = app.add_subcommand("serve", "Run the HTTP/JSON service");
  std::string serve_graph, config_path;
  int port = -1;
  serve->add_option("--graph", serve_graph, "Graph directory (or KMAP_GRAPH_DIR)");
  serve->add_option("--port", port, "Listen port (or KMAP_PORT)");
  serve->add_option("--config", config_path, "Service config (JSON)");

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Simulated relevance-feedback sessions");
  std::string spec_path, csv_path;
  int runs = 20, iterations = 6, k = 10;
  simulate->add_option("--spec", spec_path, "Synthetic corpus spec (JSON)")->required();
  simulate->add_option("--runs", runs, "Number of corpora (seeds spec.seed, spec.seed+1, ...)");
  simulate->add_option("--iterations", iterations, "Iterations per session");
  simulate->add_option("--k", k, "Cutoff for precision/recall");
  simulate->add_option("--out", csv_path, "Metrics CSV")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*ingest) {
      std::optional<std::filesystem::path> relations;
      if (!relations_path.empty()) relations = relations_path;
      const auto graph = kmap::ingest_corpus(docs_path, lexicon_path, relations, out_dir);
      std::cerr << "ingested " << graph.entities().size() << " entities, "
                << graph.documents().size() << " documents, " << graph.mentions().size()
                << " mentions, " << graph.relations().size() << " relations into " << out_dir
                << "\n";
    } else if (*rank) {
      const auto graph = kmap::load_graph(graph_dir);
      const auto index = kmap::TextIndex::build(graph);
      const auto map = kmap::KnowledgeMap::from_json(read_json_file(map_path));
      auto config = map.config();
      if (top_k > 0) config.top_k = top_k;
      const auto items = kmap::rank_items(graph, index, map.context(), query,
                                          kmap::parse_item_kind(kind_text), config);
      std::cout << "rank\titem_id\tscore\ttext_sim\tgraph_prox\n";
      std::cout << std::fixed << std::setprecision(6);
      for (const auto& item : items) {
        std::cout << item.rank << '\t' << item.item_id << '\t' << item.score << '\t'
                  << item.text_sim << '\t' << item.graph_prox << '\n';
      }
    } else if (*serve) {
      kmap::ServiceConfig config;
      if (!config_path.empty()) config = kmap::ServiceConfig::from_json(read_json_file(config_path));
      config.apply_environment();
      if (!serve_graph.empty()) config.graph_dir = serve_graph;
      if (port >= 0) config.port = port;
      if (config.graph_dir.empty()) throw kmap::InvalidArgument("no graph directory given");
      kmap::Service service(kmap::load_graph(config.graph_dir), config);
      const int bound = service.bind();
      std::cerr << "serving " << config.graph_dir << " on " << config.host << ":" << bound << "\n";
      g_service = &service;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      service.serve();
      g_service = nullptr;
    } else if (*simulate) {
      const auto spec = kmap::SyntheticCorpusSpec::from_json(read_json_file(spec_path));
      const auto results = kmap::simulate_runs(spec, runs, iterations, k);
      std::ofstream out(csv_path, std::ios::binary | std::ios::trunc);
      if (!out) throw kmap::IoError("cannot open '" + csv_path + "' for writing");
      kmap::write_metrics_csv(out, results);
      const int last = iterations - 1;
      std::cerr << std::fixed << std::setprecision(4)
                << "mean precision@" << k << ": iteration 0 = "
                << kmap::mean_precision_at(results, 0) << ", iteration " << last << " = "
                << kmap::mean_precision_at(results, last) << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
