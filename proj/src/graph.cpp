#include "kmap/graph.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <sstream>

#include "kmap/error.hpp"
#include "kmap/serialize.hpp"

namespace kmap {

std::string_view to_string(EdgeOrigin origin) {
  return origin == EdgeOrigin::mention ? "mention" : "relation";
}

Adjacency::Adjacency(std::size_t node_count, std::span<const WeightedEdge> edges)
    : arcs_(node_count), strength_(node_count, 0.0) {
  std::vector<std::map<std::size_t, double>> merged(node_count);
  for (const auto& e : edges) {
    if (e.u >= node_count || e.v >= node_count) {
      throw InvalidArgument("edge endpoint out of range");
    }
    if (!(e.weight > 0.0) || !std::isfinite(e.weight)) {
      throw InvalidArgument("edge weights must be positive and finite");
    }
    merged[e.u][e.v] += e.weight;
    if (e.u != e.v) merged[e.v][e.u] += e.weight;
  }
  for (std::size_t i = 0; i < node_count; ++i) {
    arcs_[i].reserve(merged[i].size());
    for (const auto& [target, weight] : merged[i]) {
      arcs_[i].push_back({target, weight});
      strength_[i] += weight;
    }
  }
}

RelationKey key_of(const Relation& relation) {
  return {relation.subject_id, relation.object_id, relation.kind, relation.predicate};
}

KnowledgeGraph KnowledgeGraph::assemble(std::vector<LexiconEntry> entities,
                                        std::vector<DocumentRecord> documents,
                                        std::vector<Mention> mentions,
                                        std::vector<Relation> relations) {
  KnowledgeGraph g;
  for (auto& e : entities) {
    if (e.entity_id.empty()) throw IntegrityError("entity with empty id");
    const std::string id = e.entity_id;
    if (!g.entities_.emplace(id, std::move(e)).second) {
      throw IntegrityError("duplicate entity id '" + id + "'");
    }
  }
  for (auto& d : documents) {
    if (d.doc_id.empty()) throw IntegrityError("document with empty id");
    const std::string id = d.doc_id;
    if (g.entities_.count(id)) throw IntegrityError("id '" + id + "' is both entity and document");
    if (!g.documents_.emplace(id, std::move(d)).second) {
      throw IntegrityError("duplicate document id '" + id + "'");
    }
  }

  for (const auto& m : mentions) {
    if (!g.entities_.count(m.entity_id)) {
      throw IntegrityError("mention references missing entity '" + m.entity_id + "'");
    }
    auto doc = g.documents_.find(m.doc_id);
    if (doc == g.documents_.end()) {
      throw IntegrityError("mention references missing document '" + m.doc_id + "'");
    }
    const std::string_view text = sentence_source(doc->second, m.sentence_index);
    if (m.sentence_index < 0 || m.char_start >= m.char_end || m.char_end > text.size() ||
        text.substr(m.char_start, m.char_end - m.char_start) != m.surface) {
      throw IntegrityError("mention span of '" + m.entity_id + "' in '" + m.doc_id +
                           "' does not match its surface");
    }
  }
  std::sort(mentions.begin(), mentions.end(), [](const Mention& a, const Mention& b) {
    return std::tie(a.doc_id, a.sentence_index, a.char_start, a.char_end, a.entity_id) <
           std::tie(b.doc_id, b.sentence_index, b.char_start, b.char_end, b.entity_id);
  });
  g.mentions_ = std::move(mentions);
  for (const auto& m : g.mentions_) {
    g.entity_docs_[m.entity_id].insert(m.doc_id);
    ++g.doc_entities_[m.doc_id][m.entity_id];
  }

  for (auto& r : relations) {
    if (!(r.subject_id < r.object_id)) {
      throw IntegrityError("relation '" + r.subject_id + "'-'" + r.object_id +
                           "' is not in canonical order");
    }
    for (const auto* id : {&r.subject_id, &r.object_id}) {
      if (!g.entities_.count(*id)) {
        throw IntegrityError("relation references missing entity '" + *id + "'");
      }
    }
    if (r.evidence.empty() != (r.kind == RelationKind::curated)) {
      throw IntegrityError("relation '" + r.subject_id + "'-'" + r.object_id +
                           "': evidence must be present exactly for co-occurrence relations");
    }
    for (const auto& ev : r.evidence) {
      if (!g.documents_.count(ev.doc_id)) {
        throw IntegrityError("relation evidence references missing document '" + ev.doc_id +
                             "'");
      }
    }
    if (!(r.edge_weight > 0.0) || !(r.confidence >= 0.0)) {
      throw IntegrityError("relation '" + r.subject_id + "'-'" + r.object_id +
                           "' has invalid weight or confidence");
    }
    std::sort(r.evidence.begin(), r.evidence.end());
    auto key = key_of(r);
    if (!g.relations_.emplace(std::move(key), std::move(r)).second) {
      throw IntegrityError("duplicate relation");
    }
  }

  for (const auto& [id, _] : g.entities_) g.node_ids_.push_back(id);
  g.entity_node_count_ = g.node_ids_.size();
  for (const auto& [id, _] : g.documents_) g.node_ids_.push_back(id);
  for (std::size_t i = 0; i < g.node_ids_.size(); ++i) g.node_index_.emplace(g.node_ids_[i], i);

  for (const auto& [doc_id, counts] : g.doc_entities_) {
    const std::size_t d = g.node_index_.at(doc_id);
    for (const auto& [entity_id, count] : counts) {
      const std::size_t e = g.node_index_.at(entity_id);
      g.edges_.push_back({std::min(d, e), std::max(d, e), std::log(1.0 + count),
                          EdgeOrigin::mention});
    }
  }
  for (const auto& [key, r] : g.relations_) {
    const std::size_t a = g.node_index_.at(r.subject_id);
    const std::size_t b = g.node_index_.at(r.object_id);
    g.edges_.push_back({std::min(a, b), std::max(a, b), r.edge_weight, EdgeOrigin::relation});
  }
  std::stable_sort(g.edges_.begin(), g.edges_.end(),
                   [](const WeightedEdge& a, const WeightedEdge& b) {
                     return std::tie(a.u, a.v, a.origin) < std::tie(b.u, b.v, b.origin);
                   });
  g.adjacency_ = Adjacency(g.node_ids_.size(), g.edges_);
  return g;
}

const LexiconEntry* KnowledgeGraph::find_entity(std::string_view id) const {
  auto it = entities_.find(id);
  return it == entities_.end() ? nullptr : &it->second;
}

const DocumentRecord* KnowledgeGraph::find_document(std::string_view id) const {
  auto it = documents_.find(id);
  return it == documents_.end() ? nullptr : &it->second;
}

const std::set<std::string>& KnowledgeGraph::documents_mentioning(
    std::string_view entity_id) const {
  static const std::set<std::string> kEmpty;
  auto it = entity_docs_.find(entity_id);
  return it == entity_docs_.end() ? kEmpty : it->second;
}

const std::map<std::string, int>& KnowledgeGraph::entities_in(std::string_view doc_id) const {
  static const std::map<std::string, int> kEmpty;
  auto it = doc_entities_.find(doc_id);
  return it == doc_entities_.end() ? kEmpty : it->second;
}

std::optional<std::size_t> KnowledgeGraph::node_index(std::string_view id) const {
  auto it = node_index_.find(id);
  if (it == node_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<ItemKind> KnowledgeGraph::item_kind(std::string_view id) const {
  if (entities_.count(id)) return ItemKind::entity;
  if (const auto* doc = find_document(id)) return item_kind_of(doc->kind);
  return std::nullopt;
}

std::set<std::string> KnowledgeGraph::neighbors(std::string_view node_id,
                                                std::optional<EntityType> type_filter,
                                                int max_hops) const {
  if (max_hops != 1 && max_hops != 2) throw InvalidArgument("max_hops must be 1 or 2");
  const auto start = node_index(node_id);
  if (!start) throw UnknownIdError(std::string(node_id));

  std::vector<int> depth(node_ids_.size(), -1);
  std::deque<std::size_t> queue{*start};
  depth[*start] = 0;
  std::set<std::string> out;
  while (!queue.empty()) {
    const std::size_t u = queue.front();
    queue.pop_front();
    if (depth[u] == max_hops) continue;
    for (const auto& arc : adjacency_.arcs(u)) {
      if (depth[arc.target] >= 0) continue;
      depth[arc.target] = depth[u] + 1;
      queue.push_back(arc.target);
      if (!is_entity_node(arc.target)) continue;
      const auto& id = node_ids_[arc.target];
      if (!type_filter || entities_.find(id)->second.entity_type == *type_filter) out.insert(id);
    }
  }
  return out;
}

bool KnowledgeGraph::operator==(const KnowledgeGraph& other) const {
  return entities_ == other.entities_ && documents_ == other.documents_ &&
         mentions_ == other.mentions_ && relations_ == other.relations_;
}

Provenance provenance_of(const KnowledgeGraph& graph, std::string_view node_id) {
  if (const auto* entity = graph.find_entity(node_id)) return {entity->source, ""};
  if (!graph.find_document(node_id)) throw UnknownIdError(std::string(node_id), "provenance");
  const auto colon = node_id.find(':');
  const std::string_view ns = colon == std::string_view::npos ? "" : node_id.substr(0, colon);
  const std::string local(colon == std::string_view::npos ? node_id : node_id.substr(colon + 1));
  if (ns == "pmid") return {std::string(node_id), "https://pubmed.ncbi.nlm.nih.gov/" + local + "/"};
  if (ns == "nct") return {std::string(node_id), "https://clinicaltrials.gov/study/" + local};
  return {std::string(node_id), ""};
}

// Persistence ---------------------------------------------------------------

namespace {

constexpr const char* kManifest = "manifest.json";
constexpr const char* kEntitiesFile = "entities.jsonl";
constexpr const char* kDocumentsFile = "documents.jsonl";
constexpr const char* kMentionsFile = "mentions.jsonl";
constexpr const char* kRelationsFile = "relations.jsonl";

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

template <typename Range, typename Fn>
std::string jsonl(const Range& range, Fn&& project) {
  std::string text;
  for (const auto& item : range) {
    text += json(project(item)).dump();
    text.push_back('\n');
  }
  return text;
}

template <typename T>
std::vector<T> read_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::vector<T> items;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      items.push_back(json::parse(line).get<T>());
    } catch (const std::exception& e) {
      throw ParseError(path.string(), line_no, e.what());
    }
  }
  return items;
}

}  // namespace

void save_graph(const KnowledgeGraph& graph, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create '" + dir.string() + "': " + ec.message());

  const auto identity = [](const auto& x) -> const auto& { return x; };
  const auto second = [](const auto& kv) -> const auto& { return kv.second; };
  write_text(dir / kEntitiesFile, jsonl(graph.entities(), second));
  write_text(dir / kDocumentsFile, jsonl(graph.documents(), second));
  write_text(dir / kMentionsFile, jsonl(graph.mentions(), identity));
  write_text(dir / kRelationsFile, jsonl(graph.relations(), second));

  json manifest{{"format_version", kGraphFormatVersion},
                {"counts",
                 {{"entities", graph.entities().size()},
                  {"documents", graph.documents().size()},
                  {"mentions", graph.mentions().size()},
                  {"relations", graph.relations().size()}}}};
  write_text(dir / kManifest, manifest.dump(2) + "\n");
}

KnowledgeGraph load_graph(const std::filesystem::path& dir) {
  const auto manifest_path = dir / kManifest;
  std::ifstream in(manifest_path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + manifest_path.string() + "'");
  json manifest;
  try {
    manifest = json::parse(in);
  } catch (const std::exception& e) {
    throw ParseError(manifest_path.string(), 0, e.what());
  }
  const int version = manifest.value("format_version", 0);
  if (version != kGraphFormatVersion) {
    throw IntegrityError("graph format version " + std::to_string(version) +
                         " is not supported (this build reads version " +
                         std::to_string(kGraphFormatVersion) + ")");
  }

  auto entities = read_jsonl<LexiconEntry>(dir / kEntitiesFile);
  auto documents = read_jsonl<DocumentRecord>(dir / kDocumentsFile);
  auto mentions = read_jsonl<Mention>(dir / kMentionsFile);
  auto relations = read_jsonl<Relation>(dir / kRelationsFile);

  const auto check = [&](const char* name, std::size_t actual) {
    const auto expected = manifest.at("counts").value(name, static_cast<std::size_t>(0));
    if (expected != actual) {
      throw IntegrityError(std::string("manifest lists ") + std::to_string(expected) + " " +
                           name + " but " + std::to_string(actual) + " were found");
    }
  };
  check("entities", entities.size());
  check("documents", documents.size());
  check("mentions", mentions.size());
  check("relations", relations.size());

  return KnowledgeGraph::assemble(std::move(entities), std::move(documents), std::move(mentions),
                                  std::move(relations));
}

}  // namespace kmap
