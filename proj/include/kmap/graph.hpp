#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kmap/types.hpp"

namespace kmap {

enum class EdgeOrigin { mention, relation };

std::string_view to_string(EdgeOrigin origin);

/// Undirected edge between node indices, stored once with u < v.
struct WeightedEdge {
  std::size_t u = 0;
  std::size_t v = 0;
  double weight = 0.0;
  EdgeOrigin origin = EdgeOrigin::mention;

  bool operator==(const WeightedEdge&) const = default;
};

struct Arc {
  std::size_t target = 0;
  double weight = 0.0;
};

/// Symmetric adjacency lists over node indices [0, n). Parallel edges between
/// the same pair are merged by summing their weights.
class Adjacency {
 public:
  Adjacency() = default;
  Adjacency(std::size_t node_count, std::span<const WeightedEdge> edges);

  std::size_t size() const noexcept { return arcs_.size(); }
  std::span<const Arc> arcs(std::size_t node) const { return arcs_[node]; }
  /// Sum of incident edge weights.
  double strength(std::size_t node) const { return strength_[node]; }

 private:
  std::vector<std::vector<Arc>> arcs_;
  std::vector<double> strength_;
};

struct RelationKey {
  std::string subject_id;
  std::string object_id;
  RelationKind kind = RelationKind::cooccurrence;
  std::string predicate;

  auto operator<=>(const RelationKey&) const = default;
};

RelationKey key_of(const Relation& relation);

/// Immutable store of entities, documents, mentions and relations. Entities and
/// documents are both graph nodes; mentions and relations induce weighted edges.
class KnowledgeGraph {
 public:
  KnowledgeGraph() = default;

  /// Validates referential integrity and builds indexes plus the weighted-edge
  /// view. Throws IntegrityError on dangling references.
  static KnowledgeGraph assemble(std::vector<LexiconEntry> entities,
                                 std::vector<DocumentRecord> documents,
                                 std::vector<Mention> mentions, std::vector<Relation> relations);

  const std::map<std::string, LexiconEntry, std::less<>>& entities() const { return entities_; }
  const std::map<std::string, DocumentRecord, std::less<>>& documents() const { return documents_; }
  /// Sorted by (doc_id, sentence_index, char_start).
  const std::vector<Mention>& mentions() const { return mentions_; }
  const std::map<RelationKey, Relation>& relations() const { return relations_; }

  const LexiconEntry* find_entity(std::string_view id) const;
  const DocumentRecord* find_document(std::string_view id) const;

  /// Documents containing at least one mention of the entity.
  const std::set<std::string>& documents_mentioning(std::string_view entity_id) const;
  /// Entity id -> mention count within one document.
  const std::map<std::string, int>& entities_in(std::string_view doc_id) const;

  std::size_t node_count() const noexcept { return node_ids_.size(); }
  std::optional<std::size_t> node_index(std::string_view id) const;
  const std::string& node_id(std::size_t index) const { return node_ids_[index]; }
  bool is_entity_node(std::size_t index) const { return index < entity_node_count_; }
  bool has_node(std::string_view id) const { return node_index(id).has_value(); }
  std::optional<ItemKind> item_kind(std::string_view id) const;

  /// Sorted by (u, v, origin).
  std::span<const WeightedEdge> edges() const { return edges_; }
  const Adjacency& adjacency() const { return adjacency_; }

  /// Entity ids within `max_hops` (1 or 2) of `node_id`, excluding the start.
  /// Document nodes are traversed but never returned.
  std::set<std::string> neighbors(std::string_view node_id, std::optional<EntityType> type_filter,
                                  int max_hops) const;

  /// Structural equality over the four stored tables.
  bool operator==(const KnowledgeGraph& other) const;

 private:
  std::map<std::string, LexiconEntry, std::less<>> entities_;
  std::map<std::string, DocumentRecord, std::less<>> documents_;
  std::vector<Mention> mentions_;
  std::map<RelationKey, Relation> relations_;

  std::map<std::string, std::set<std::string>, std::less<>> entity_docs_;
  std::map<std::string, std::map<std::string, int>, std::less<>> doc_entities_;

  std::vector<std::string> node_ids_;  // entities first, then documents, each sorted
  std::map<std::string, std::size_t, std::less<>> node_index_;
  std::size_t entity_node_count_ = 0;
  std::vector<WeightedEdge> edges_;
  Adjacency adjacency_;
};

/// Where a node came from: the lexicon source for entities, the record id and a
/// public link (PubMed, ClinicalTrials.gov) for documents.
struct Provenance {
  std::string source;
  std::string url;  // empty when the id namespace has no known resolver
};

/// Throws UnknownIdError for ids outside the graph.
Provenance provenance_of(const KnowledgeGraph& graph, std::string_view node_id);

inline constexpr int kGraphFormatVersion = 1;

/// Writes manifest.json, entities.jsonl, documents.jsonl, mentions.jsonl and
/// relations.jsonl. Output is byte-deterministic for a given graph.
void save_graph(const KnowledgeGraph& graph, const std::filesystem::path& dir);

KnowledgeGraph load_graph(const std::filesystem::path& dir);

}  // namespace kmap
