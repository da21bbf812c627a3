#include "kmap/service.hpp"

#include <httplib.h>

#include <algorithm>
#include <cstdlib>
#include <fstream>

#include "kmap/error.hpp"

namespace kmap {
namespace {

ApiResponse error_response(int status, const std::string& message) {
  return {status, json{{"error", message}}};
}

std::vector<std::string> split_path(const std::string& path) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (start <= path.size()) {
    auto end = path.find('/', start);
    if (end == std::string::npos) end = path.size();
    if (end > start) parts.push_back(path.substr(start, end - start));
    start = end + 1;
  }
  return parts;
}

std::string param(const ApiRequest& request, const std::string& key) {
  auto it = request.params.find(key);
  return it == request.params.end() ? std::string{} : it->second;
}

json parse_body(const ApiRequest& request) {
  if (request.body.empty()) return json::object();
  try {
    return json::parse(request.body);
  } catch (const json::parse_error& e) {
    throw InvalidArgument(std::string("request body is not valid JSON: ") + e.what());
  }
}

std::string trimmed(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  return s.substr(first, s.find_last_not_of(" \t\r\n") - first + 1);
}

}  // namespace

// Configuration -------------------------------------------------------------

ServiceConfig ServiceConfig::from_json(const json& j) {
  ServiceConfig config;
  if (!j.is_object()) throw InvalidArgument("service config must be a JSON object");
  try {
    if (j.contains("graph_dir")) config.graph_dir = j.at("graph_dir").get<std::string>();
    config.host = j.value("host", config.host);
    config.port = j.value("port", config.port);
    config.ranking = ranking_config_from_json(j.value("ranking", json{}));
    config.cors_allow = j.value("cors_allow", std::vector<std::string>{});
    if (j.contains("maps_file")) config.maps_file = j.at("maps_file").get<std::string>();
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("service config: ") + e.what());
  }
  return config;
}

void ServiceConfig::apply_environment() {
  if (const char* port_env = std::getenv("KMAP_PORT"); port_env && *port_env) {
    try {
      port = std::stoi(port_env);
    } catch (const std::exception&) {
      throw InvalidArgument(std::string("KMAP_PORT is not a number: ") + port_env);
    }
  }
  if (const char* dir = std::getenv("KMAP_GRAPH_DIR"); dir && *dir) graph_dir = dir;
}

// JSON views ----------------------------------------------------------------

json map_state_json(const KnowledgeMap& map) {
  json j = map.to_json();
  j["dirty"] = map.dirty();
  j["fingerprint"] = map.fingerprint();
  j["revision"] = map.revision();
  j["snapshot_computed_at"] =
      map.snapshot() ? json(map.snapshot()->computed_at) : json(nullptr);
  return j;
}

json item_json(const KnowledgeGraph& graph, const RankedItem& item) {
  json j = to_json(item);
  const auto prov = provenance_of(graph, item.item_id);
  j["provenance"] = {{"source", prov.source}, {"url", prov.url}};
  if (const auto* entity = graph.find_entity(item.item_id)) {
    j["entity_type"] = to_string(entity->entity_type);
    j["canonical_name"] = entity->canonical_name;
  } else if (const auto* doc = graph.find_document(item.item_id)) {
    j["title"] = doc->title;
  }
  return j;
}

namespace {

json items_json(const KnowledgeGraph& graph, const std::vector<RankedItem>& items) {
  json out = json::array();
  for (const auto& item : items) out.push_back(item_json(graph, item));
  return out;
}

}  // namespace

// Service -------------------------------------------------------------------

Service::Service(KnowledgeGraph graph, ServiceConfig config)
    : graph_(std::move(graph)), index_(TextIndex::build(graph_)), config_(std::move(config)) {
  config_.ranking.validate();
  if (config_.maps_file && std::filesystem::exists(*config_.maps_file)) {
    load_maps(*config_.maps_file);
  }
}

Service::~Service() {
  stop();
  if (config_.maps_file) {
    try {
      save_maps(*config_.maps_file);
    } catch (const std::exception&) {
      // Shutdown persistence is best effort.
    }
  }
}

std::shared_ptr<Service::MapSlot> Service::find_slot(const std::string& map_id) const {
  std::shared_lock lock(maps_mutex_);
  auto it = maps_.find(map_id);
  return it == maps_.end() ? nullptr : it->second;
}

ApiResponse Service::handle(const ApiRequest& request) {
  try {
    return route(request);
  } catch (const UnknownIdError& e) {
    return error_response(422, e.what());
  } catch (const InvalidArgument& e) {
    return error_response(400, e.what());
  } catch (const std::exception& e) {
    return error_response(500, e.what());
  }
}

ApiResponse Service::route(const ApiRequest& request) {
  const auto parts = split_path(request.path);
  const std::string& method = request.method;

  if (method == "OPTIONS") return {204, nullptr};

  if (parts.size() == 1 && parts[0] == "search") {
    if (method != "GET") return error_response(405, "method not allowed");
    return search(request);
  }
  if (parts.empty() || parts[0] != "maps") return error_response(404, "no such endpoint");

  if (parts.size() == 1) {
    if (method != "POST") return error_response(405, "method not allowed");
    return create_map(request);
  }

  auto slot = find_slot(parts[1]);
  if (!slot) return error_response(404, "unknown map '" + parts[1] + "'");

  if (parts.size() == 2) {
    if (method != "GET") return error_response(405, "method not allowed");
    std::shared_lock lock(slot->mutex);
    return {200, map_state_json(slot->map)};
  }

  const std::string& action = parts[2];
  if (action == "landmarks" || action == "stars") {
    if (parts.size() > 4) return error_response(404, "no such endpoint");
    if (method != "POST" && method != "DELETE") return error_response(405, "method not allowed");
    ApiRequest inner = request;
    if (parts.size() == 4) inner.params["id"] = parts[3];
    return mutate(*slot, inner, action);
  }
  if (action == "refresh" && parts.size() == 3) {
    if (method != "POST") return error_response(405, "method not allowed");
    std::unique_lock lock(slot->mutex);
    const auto& snapshot = slot->map.refresh(graph_, index_);
    json body = map_state_json(slot->map);
    body["snapshot"] = {{"computed_at", snapshot.computed_at},
                        {"fingerprint", snapshot.fingerprint},
                        {"publications", items_json(graph_, snapshot.publications)},
                        {"clinical_trials", items_json(graph_, snapshot.clinical_trials)}};
    return {200, std::move(body)};
  }
  if (action == "results" && parts.size() == 3) {
    if (method != "GET") return error_response(405, "method not allowed");
    const std::string kind_text = param(request, "kind");
    std::optional<ItemKind> kind;
    if (!kind_text.empty()) {
      kind = parse_item_kind(kind_text);
      if (!kind || *kind == ItemKind::entity) {
        return error_response(400, "kind must be publication or clinical_trial");
      }
    }
    std::shared_lock lock(slot->mutex);
    const auto& snapshot = slot->map.snapshot();
    if (!snapshot) return error_response(409, "map has not been refreshed yet");
    json body{{"map_id", slot->map.id()},
              {"dirty", slot->map.dirty()},
              {"fingerprint", slot->map.fingerprint()},
              {"snapshot_fingerprint", snapshot->fingerprint},
              {"computed_at", snapshot->computed_at}};
    if (!kind || *kind == ItemKind::publication) {
      body["publications"] = items_json(graph_, snapshot->publications);
    }
    if (!kind || *kind == ItemKind::clinical_trial) {
      body["clinical_trials"] = items_json(graph_, snapshot->clinical_trials);
    }
    return {200, std::move(body)};
  }
  if (action == "cards" && parts.size() == 4) {
    if (method != "GET") return error_response(405, "method not allowed");
    if (!graph_.find_entity(parts[3])) {
      return error_response(404, "unknown entity '" + parts[3] + "'");
    }
    std::shared_lock lock(slot->mutex);
    const Card card = slot->map.build_card(graph_, index_, parts[3]);
    json body = to_json(card);
    for (std::size_t i = 0; i < card.sections.size(); ++i) {
      body["sections"][i]["items"] = items_json(graph_, card.sections[i].items);
    }
    body["map_id"] = slot->map.id();
    body["dirty"] = slot->map.dirty();
    body["fingerprint"] = slot->map.fingerprint();
    return {200, std::move(body)};
  }
  return error_response(404, "no such endpoint");
}

ApiResponse Service::search(const ApiRequest& request) const {
  const std::string q = trimmed(param(request, "q"));
  if (q.empty()) return error_response(400, "query parameter q must not be empty");
  std::optional<ItemKind> kind;
  if (const auto kind_text = param(request, "kind"); !kind_text.empty()) {
    kind = parse_item_kind(kind_text);
    if (!kind) return error_response(400, "unknown kind '" + kind_text + "'");
  }
  auto items = rank_items(graph_, index_, MapContext{}, q, kind, config_.ranking);
  std::erase_if(items, [](const RankedItem& item) { return item.text_sim <= 0.0; });
  return {200, json{{"query", q}, {"results", items_json(graph_, items)}}};
}

ApiResponse Service::create_map(const ApiRequest& request) {
  const json body = parse_body(request);
  const RankingConfig config =
      ranking_config_from_json(body.value("config", json{}), config_.ranking);
  auto slot = std::make_shared<MapSlot>(KnowledgeMap(config));
  json state = map_state_json(slot->map);
  std::unique_lock lock(maps_mutex_);
  maps_.emplace(slot->map.id(), std::move(slot));
  return {201, std::move(state)};
}

ApiResponse Service::mutate(MapSlot& slot, const ApiRequest& request,
                            const std::string& collection) {
  const bool landmarks = collection == "landmarks";
  std::string id = param(request, "id");
  if (id.empty()) {
    const json body = parse_body(request);
    for (const char* key : {landmarks ? "entity_id" : "doc_id", "id"}) {
      if (body.contains(key) && body.at(key).is_string()) {
        id = body.at(key).get<std::string>();
        break;
      }
    }
  }
  if (id.empty()) {
    return error_response(400, landmarks ? "missing entity_id" : "missing doc_id");
  }

  std::unique_lock lock(slot.mutex);
  const bool add = request.method == "POST";
  bool changed = false;
  if (landmarks) {
    changed = add ? slot.map.add_landmark(graph_, id) : slot.map.remove_landmark(graph_, id);
  } else {
    changed = add ? slot.map.star_document(graph_, id) : slot.map.unstar_document(graph_, id);
  }
  json body = map_state_json(slot.map);
  body["changed"] = changed;
  return {200, std::move(body)};
}

std::vector<std::pair<std::string, std::string>> Service::cors_headers(
    const std::string& origin) const {
  if (origin.empty()) return {};
  const bool any = std::find(config_.cors_allow.begin(), config_.cors_allow.end(), "*") !=
                   config_.cors_allow.end();
  const bool listed = std::find(config_.cors_allow.begin(), config_.cors_allow.end(), origin) !=
                      config_.cors_allow.end();
  if (!any && !listed) return {};
  return {{"Access-Control-Allow-Origin", any ? "*" : origin},
          {"Access-Control-Allow-Methods", "GET, POST, DELETE, OPTIONS"},
          {"Access-Control-Allow-Headers", "Content-Type"},
          {"Vary", "Origin"}};
}

int Service::bind() {
  server_ = std::make_unique<httplib::Server>();
  // Route handlers, not the pre-routing hook: httplib reads the body only after routing.
  auto dispatch = [this](const httplib::Request& req, httplib::Response& res) {
    ApiRequest request{req.method, req.path, {}, req.body};
    for (const auto& [key, value] : req.params) request.params.emplace(key, value);
    const ApiResponse response = handle(request);
    res.status = response.status;
    for (const auto& [name, value] : cors_headers(req.get_header_value("Origin"))) {
      res.set_header(name, value);
    }
    if (!response.body.is_null()) res.set_content(response.body.dump(), "application/json");
  };
  const std::string any = "/.*";
  server_->Get(any, dispatch);
  server_->Post(any, dispatch);
  server_->Put(any, dispatch);
  server_->Patch(any, dispatch);
  server_->Delete(any, dispatch);
  server_->Options(any, dispatch);
  if (config_.port == 0) {
    const int port = server_->bind_to_any_port(config_.host);
    if (port < 0) throw IoError("cannot bind to " + config_.host);
    return port;
  }
  if (!server_->bind_to_port(config_.host, config_.port)) {
    throw IoError("cannot bind to " + config_.host + ":" + std::to_string(config_.port));
  }
  return config_.port;
}

void Service::serve() {
  if (!server_) bind();
  server_->listen_after_bind();
}

void Service::stop() {
  if (server_) server_->stop();
}

void Service::save_maps(const std::filesystem::path& path) const {
  json maps = json::array();
  {
    std::shared_lock lock(maps_mutex_);
    for (const auto& [id, slot] : maps_) {
      std::shared_lock slot_lock(slot->mutex);
      maps.push_back(slot->map.to_json());
    }
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << maps.dump(2) << "\n";
}

void Service::load_maps(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  json maps;
  try {
    maps = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(path.string(), 0, e.what());
  }
  if (!maps.is_array()) throw InvalidArgument("maps file must hold a JSON array");
  std::unique_lock lock(maps_mutex_);
  for (const auto& j : maps) {
    auto map = KnowledgeMap::from_json(j);
    for (const auto& id : map.landmarks()) {
      if (!graph_.find_entity(id)) throw UnknownIdError(id, "restored map " + map.id());
    }
    for (const auto& id : map.starred_docs()) {
      if (!graph_.find_document(id)) throw UnknownIdError(id, "restored map " + map.id());
    }
    const std::string id = map.id();
    maps_[id] = std::make_shared<MapSlot>(std::move(map));
  }
}

}  // namespace kmap
