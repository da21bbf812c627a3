#pragma once

// HTTP/JSON façade over the knowledge graph and in-memory knowledge maps.

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "kmap/graph.hpp"
#include "kmap/rank.hpp"
#include "kmap/serialize.hpp"
#include "kmap/session.hpp"

namespace httplib {
class Server;
}

namespace kmap {

struct ServiceConfig {
  std::filesystem::path graph_dir;
  std::string host = "127.0.0.1";
  int port = 8080;
  RankingConfig ranking;
  /// Origins allowed by CORS; "*" allows any origin.
  std::vector<std::string> cors_allow;
  /// Maps are restored from and written back to this file when set.
  std::optional<std::filesystem::path> maps_file;

  /// Keys: graph_dir, host, port, ranking{...}, cors_allow[], maps_file.
  static ServiceConfig from_json(const json& j);
  /// KMAP_PORT and KMAP_GRAPH_DIR override the corresponding fields.
  void apply_environment();
};

struct ApiRequest {
  std::string method;
  std::string path;  // decoded, without query string
  std::map<std::string, std::string> params;
  std::string body;
};

struct ApiResponse {
  int status = 200;
  json body;
};

class Service {
 public:
  Service(KnowledgeGraph graph, ServiceConfig config);
  ~Service();

  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  /// Routes one request. Never throws; failures map to 4xx/5xx bodies of the
  /// form {"error": "..."}.
  ApiResponse handle(const ApiRequest& request);

  /// CORS headers for an Origin value, empty when not allowed.
  std::vector<std::pair<std::string, std::string>> cors_headers(const std::string& origin) const;

  /// Binds to config.port (0 picks a free port) and returns the bound port.
  int bind();
  /// Blocks serving requests until stop() is called.
  void serve();
  void stop();

  void save_maps(const std::filesystem::path& path) const;
  void load_maps(const std::filesystem::path& path);

  const KnowledgeGraph& graph() const noexcept { return graph_; }
  const TextIndex& index() const noexcept { return index_; }

 private:
  struct MapSlot {
    mutable std::shared_mutex mutex;
    KnowledgeMap map;
    explicit MapSlot(KnowledgeMap m) : map(std::move(m)) {}
  };

  std::shared_ptr<MapSlot> find_slot(const std::string& map_id) const;
  ApiResponse route(const ApiRequest& request);
  ApiResponse search(const ApiRequest& request) const;
  ApiResponse create_map(const ApiRequest& request);
  ApiResponse mutate(MapSlot& slot, const ApiRequest& request, const std::string& collection);

  KnowledgeGraph graph_;
  TextIndex index_;
  ServiceConfig config_;

  mutable std::shared_mutex maps_mutex_;
  std::map<std::string, std::shared_ptr<MapSlot>> maps_;

  std::unique_ptr<httplib::Server> server_;
};

json map_state_json(const KnowledgeMap& map);

/// Ranked item enriched with display fields and provenance.
json item_json(const KnowledgeGraph& graph, const RankedItem& item);

}  // namespace kmap
