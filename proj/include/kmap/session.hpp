#pragma once

// Knowledge-map state: landmarks, starred documents, staleness and ranking
// snapshots, plus entity cards ranked in the context of the whole map.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kmap/graph.hpp"
#include "kmap/rank.hpp"
#include "kmap/serialize.hpp"

namespace kmap {

struct RankingSnapshot {
  std::uint64_t computed_at = 0;  // per-map sequence number, starts at 1
  std::string fingerprint;
  std::vector<RankedItem> publications;
  std::vector<RankedItem> clinical_trials;

  bool operator==(const RankingSnapshot&) const = default;
};

struct CardSection {
  std::string name;
  std::vector<RankedItem> items;

  bool operator==(const CardSection&) const = default;
};

struct Card {
  std::string entity_id;
  std::string canonical_name;
  EntityType entity_type = EntityType::disease;
  std::string summary;
  std::vector<CardSection> sections;
};

inline constexpr std::string_view kRelatedPublications = "related publications";
inline constexpr std::string_view kRelatedClinicalTrials = "related clinical trials";
inline constexpr std::string_view kAssociatedGenes = "associated genes";
inline constexpr std::string_view kAssociatedDrugs = "associated drugs";
inline constexpr std::string_view kRelatedVariants = "related variants";
inline constexpr std::string_view kRelatedPathways = "related pathways and processes";

/// Section names shown on a card for an entity of `type`, in display order.
std::vector<std::string_view> card_sections_for(EntityType type);

class KnowledgeMap {
 public:
  /// Empty, dirty map with a fresh id.
  explicit KnowledgeMap(RankingConfig config = {});

  const std::string& id() const noexcept { return id_; }
  const std::vector<std::string>& landmarks() const noexcept { return landmarks_; }
  const std::vector<std::string>& starred_docs() const noexcept { return starred_docs_; }
  const RankingConfig& config() const noexcept { return config_; }
  const std::optional<RankingSnapshot>& snapshot() const noexcept { return snapshot_; }
  /// Number of effective mutations applied so far.
  std::uint64_t revision() const noexcept { return revision_; }
  bool dirty() const noexcept;
  /// Digest of the revision and the ordered membership lists.
  std::string fingerprint() const;

  bool contains(std::string_view id) const;
  MapContext context() const { return {landmarks_, starred_docs_}; }

  // Each mutation validates the id against the graph (UnknownIdError) and
  // returns whether the map changed. Starring an entity adds it as a landmark.
  bool add_landmark(const KnowledgeGraph& graph, std::string_view entity_id);
  bool remove_landmark(const KnowledgeGraph& graph, std::string_view entity_id);
  bool star_document(const KnowledgeGraph& graph, std::string_view doc_id);
  bool unstar_document(const KnowledgeGraph& graph, std::string_view doc_id);

  /// Ranks publications and clinical trials with an empty query and stores the
  /// result as the current snapshot.
  const RankingSnapshot& refresh(const KnowledgeGraph& graph, const TextIndex& index);

  /// Read-only: never touches the snapshot or the dirty state.
  Card build_card(const KnowledgeGraph& graph, const TextIndex& index,
                  std::string_view entity_id) const;

  /// {map_id, landmarks, starred_docs, config}
  json to_json() const;
  /// Imported maps start dirty with no snapshot. Ids are not validated here.
  static KnowledgeMap from_json(const json& j);

 private:
  void validate_members(const KnowledgeGraph& graph) const;

  std::string id_;
  std::vector<std::string> landmarks_;
  std::vector<std::string> starred_docs_;
  RankingConfig config_;
  std::optional<RankingSnapshot> snapshot_;
  std::uint64_t revision_ = 0;
  std::uint64_t sequence_ = 0;
};

json to_json(const RankingConfig& config);
/// Missing keys keep their defaults; the result is validated.
RankingConfig ranking_config_from_json(const json& j, RankingConfig base = {});

json to_json(const RankedItem& item);
json to_json(const RankingSnapshot& snapshot);
json to_json(const Card& card);

}  // namespace kmap
