#include "kmap/serialize.hpp"

#include "kmap/error.hpp"

namespace kmap {
namespace {

template <typename Enum>
Enum parse_enum(const json& j, const char* key, std::optional<Enum> (*parse)(std::string_view)) {
  const auto text = j.at(key).get<std::string>();
  auto value = parse(text);
  if (!value) throw InvalidArgument(std::string("invalid ") + key + " '" + text + "'");
  return *value;
}

}  // namespace

void to_json(json& j, const DocumentRecord& doc) {
  j = json::object();
  j["doc_id"] = doc.doc_id;
  j["kind"] = to_string(doc.kind);
  j["title"] = doc.title;
  j["authors"] = doc.authors;
  if (doc.date) j["date"] = *doc.date;
  j["body"] = doc.body;
  j["metadata"] = doc.metadata;
}

void from_json(const json& j, DocumentRecord& doc) {
  doc.doc_id = j.at("doc_id").get<std::string>();
  doc.kind = parse_enum<DocKind>(j, "kind", parse_doc_kind);
  doc.title = j.at("title").get<std::string>();
  doc.authors = j.value("authors", std::vector<std::string>{});
  doc.date.reset();
  if (j.contains("date")) doc.date = j.at("date").get<std::string>();
  doc.body = j.value("body", std::string{});
  doc.metadata = j.value("metadata", std::map<std::string, std::vector<std::string>>{});
}

void to_json(json& j, const LexiconEntry& entry) {
  j = json{{"entity_id", entry.entity_id},
           {"entity_type", to_string(entry.entity_type)},
           {"canonical_name", entry.canonical_name},
           {"synonyms", entry.synonyms},
           {"summary", entry.summary},
           {"source", entry.source}};
}

void from_json(const json& j, LexiconEntry& entry) {
  entry.entity_id = j.at("entity_id").get<std::string>();
  entry.entity_type = parse_enum<EntityType>(j, "entity_type", parse_entity_type);
  entry.canonical_name = j.at("canonical_name").get<std::string>();
  entry.synonyms = j.at("synonyms").get<std::vector<std::string>>();
  entry.summary = j.value("summary", std::string{});
  entry.source = j.value("source", std::string{});
}

void to_json(json& j, const Mention& mention) {
  j = json{{"entity_id", mention.entity_id},     {"doc_id", mention.doc_id},
           {"sentence_index", mention.sentence_index}, {"char_start", mention.char_start},
           {"char_end", mention.char_end},       {"surface", mention.surface}};
}

void from_json(const json& j, Mention& mention) {
  mention.entity_id = j.at("entity_id").get<std::string>();
  mention.doc_id = j.at("doc_id").get<std::string>();
  mention.sentence_index = j.at("sentence_index").get<int>();
  mention.char_start = j.at("char_start").get<std::size_t>();
  mention.char_end = j.at("char_end").get<std::size_t>();
  mention.surface = j.at("surface").get<std::string>();
}

void to_json(json& j, const Relation& relation) {
  json evidence = json::array();
  for (const auto& e : relation.evidence) evidence.push_back({e.doc_id, e.sentence_index});
  j = json{{"subject_id", relation.subject_id},
           {"object_id", relation.object_id},
           {"kind", to_string(relation.kind)},
           {"predicate", relation.predicate},
           {"confidence", relation.confidence},
           {"edge_weight", relation.edge_weight},
           {"evidence", std::move(evidence)},
           {"source", relation.source}};
}

void from_json(const json& j, Relation& relation) {
  relation.subject_id = j.at("subject_id").get<std::string>();
  relation.object_id = j.at("object_id").get<std::string>();
  relation.kind = parse_enum<RelationKind>(j, "kind", parse_relation_kind);
  relation.predicate = j.at("predicate").get<std::string>();
  relation.confidence = j.at("confidence").get<double>();
  relation.edge_weight = j.at("edge_weight").get<double>();
  relation.evidence.clear();
  for (const auto& e : j.at("evidence")) {
    relation.evidence.push_back({e.at(0).get<std::string>(), e.at(1).get<int>()});
  }
  relation.source = j.value("source", std::string{});
}

}  // namespace kmap
