#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace kmap {

enum class DocKind { publication, clinical_trial };

enum class EntityType { disease, gene, drug, protein, pathway, variant, process };

/// Kinds of rankable items: the two document kinds plus entities.
enum class ItemKind { publication, clinical_trial, entity };

enum class RelationKind { cooccurrence, curated };

std::string_view to_string(DocKind kind);
std::string_view to_string(EntityType type);
std::string_view to_string(ItemKind kind);
std::string_view to_string(RelationKind kind);

std::optional<DocKind> parse_doc_kind(std::string_view text);
std::optional<EntityType> parse_entity_type(std::string_view text);
std::optional<ItemKind> parse_item_kind(std::string_view text);
std::optional<RelationKind> parse_relation_kind(std::string_view text);

inline ItemKind item_kind_of(DocKind kind) {
  return kind == DocKind::publication ? ItemKind::publication : ItemKind::clinical_trial;
}

struct DocumentRecord {
  std::string doc_id;
  DocKind kind = DocKind::publication;
  std::string title;
  std::vector<std::string> authors;
  std::optional<std::string> date;
  std::string body;
  std::map<std::string, std::vector<std::string>> metadata;

  bool operator==(const DocumentRecord&) const = default;
};

struct LexiconEntry {
  std::string entity_id;
  EntityType entity_type = EntityType::disease;
  std::string canonical_name;
  std::vector<std::string> synonyms;  // always contains canonical_name
  std::string summary;
  std::string source;

  bool operator==(const LexiconEntry&) const = default;
};

struct CuratedRelationRecord {
  std::string subject_id;
  std::string object_id;
  std::string predicate;
  double confidence = 0.0;
  std::string source;

  bool operator==(const CuratedRelationRecord&) const = default;
};

/// Sentence span. Index 0 is the document title and its span points into the
/// title; every other index points into the body.
struct Sentence {
  std::string doc_id;
  int index = 0;
  std::size_t char_start = 0;
  std::size_t char_end = 0;

  bool operator==(const Sentence&) const = default;
};

struct Mention {
  std::string entity_id;
  std::string doc_id;
  int sentence_index = 0;
  std::size_t char_start = 0;
  std::size_t char_end = 0;
  std::string surface;

  bool operator==(const Mention&) const = default;
};

struct Evidence {
  std::string doc_id;
  int sentence_index = 0;

  auto operator<=>(const Evidence&) const = default;
};

/// Undirected relation in canonical form (subject_id < object_id).
struct Relation {
  std::string subject_id;
  std::string object_id;
  RelationKind kind = RelationKind::cooccurrence;
  std::string predicate;
  double confidence = 0.0;
  double edge_weight = 0.0;
  std::vector<Evidence> evidence;
  std::string source;

  bool operator==(const Relation&) const = default;
};

inline constexpr std::string_view kCooccursWith = "cooccurs_with";

/// Text that a mention's span indexes into: the title for sentence 0, the body otherwise.
inline std::string_view sentence_source(const DocumentRecord& doc, int sentence_index) {
  return sentence_index == 0 ? std::string_view(doc.title) : std::string_view(doc.body);
}

}  // namespace kmap
