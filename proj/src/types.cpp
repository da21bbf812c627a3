#include "kmap/types.hpp"

#include <array>
#include <utility>

namespace kmap {
namespace {

constexpr std::array<std::pair<DocKind, std::string_view>, 2> kDocKinds{{
    {DocKind::publication, "publication"},
    {DocKind::clinical_trial, "clinical_trial"},
}};

constexpr std::array<std::pair<EntityType, std::string_view>, 7> kEntityTypes{{
    {EntityType::disease, "disease"},
    {EntityType::gene, "gene"},
    {EntityType::drug, "drug"},
    {EntityType::protein, "protein"},
    {EntityType::pathway, "pathway"},
    {EntityType::variant, "variant"},
    {EntityType::process, "process"},
}};

constexpr std::array<std::pair<ItemKind, std::string_view>, 3> kItemKinds{{
    {ItemKind::publication, "publication"},
    {ItemKind::clinical_trial, "clinical_trial"},
    {ItemKind::entity, "entity"},
}};

constexpr std::array<std::pair<RelationKind, std::string_view>, 2> kRelationKinds{{
    {RelationKind::cooccurrence, "cooccurrence"},
    {RelationKind::curated, "curated"},
}};

template <typename Table, typename Enum>
std::string_view name_of(const Table& table, Enum value) {
  for (const auto& [v, name] : table) {
    if (v == value) return name;
  }
  return "unknown";
}

template <typename Enum, typename Table>
std::optional<Enum> value_of(const Table& table, std::string_view text) {
  for (const auto& [v, name] : table) {
    if (name == text) return v;
  }
  return std::nullopt;
}

}  // namespace

std::string_view to_string(DocKind kind) { return name_of(kDocKinds, kind); }
std::string_view to_string(EntityType type) { return name_of(kEntityTypes, type); }
std::string_view to_string(ItemKind kind) { return name_of(kItemKinds, kind); }
std::string_view to_string(RelationKind kind) { return name_of(kRelationKinds, kind); }

std::optional<DocKind> parse_doc_kind(std::string_view text) {
  return value_of<DocKind>(kDocKinds, text);
}
std::optional<EntityType> parse_entity_type(std::string_view text) {
  return value_of<EntityType>(kEntityTypes, text);
}
std::optional<ItemKind> parse_item_kind(std::string_view text) {
  return value_of<ItemKind>(kItemKinds, text);
}
std::optional<RelationKind> parse_relation_kind(std::string_view text) {
  return value_of<RelationKind>(kRelationKinds, text);
}

}  // namespace kmap
