#include "kmap/session.hpp"

#include <algorithm>
#include <cstdio>
#include <mutex>
#include <random>
#include <set>

#include "kmap/error.hpp"

namespace kmap {
namespace {

std::string fresh_map_id() {
  static std::mutex mutex;
  static std::mt19937_64 rng{std::random_device{}()};
  static std::uint64_t counter = 0;
  std::lock_guard lock(mutex);
  char buf[48];
  std::snprintf(buf, sizeof buf, "km-%llu-%08llx", static_cast<unsigned long long>(++counter),
                static_cast<unsigned long long>(rng() & 0xffffffffULL));
  return buf;
}

// FNV-1a, 64 bit.
std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

bool contains(const std::vector<std::string>& v, std::string_view id) {
  return std::find(v.begin(), v.end(), id) != v.end();
}

bool erase(std::vector<std::string>& v, std::string_view id) {
  auto it = std::find(v.begin(), v.end(), id);
  if (it == v.end()) return false;
  v.erase(it);
  return true;
}

}  // namespace

std::vector<std::string_view> card_sections_for(EntityType type) {
  std::vector<std::string_view> sections{kRelatedPublications, kRelatedClinicalTrials};
  if (type == EntityType::disease) {
    sections.push_back(kAssociatedGenes);
    sections.push_back(kAssociatedDrugs);
  } else if (type == EntityType::gene) {
    sections.push_back(kRelatedVariants);
    sections.push_back(kRelatedPathways);
  }
  return sections;
}

KnowledgeMap::KnowledgeMap(RankingConfig config) : id_(fresh_map_id()), config_(config) {
  config_.validate();
}

bool KnowledgeMap::dirty() const noexcept {
  return !snapshot_ || snapshot_->fingerprint != fingerprint();
}

std::string KnowledgeMap::fingerprint() const {
  std::string text = "rev:" + std::to_string(revision_) + "\n";
  for (const auto& id : landmarks_) text += "L:" + id + "\n";
  for (const auto& id : starred_docs_) text += "S:" + id + "\n";
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(text)));
  return buf;
}

bool KnowledgeMap::contains(std::string_view id) const {
  return kmap::contains(landmarks_, id) || kmap::contains(starred_docs_, id);
}

bool KnowledgeMap::add_landmark(const KnowledgeGraph& graph, std::string_view entity_id) {
  if (!graph.find_entity(entity_id)) throw UnknownIdError(std::string(entity_id), "landmark");
  if (kmap::contains(landmarks_, entity_id)) return false;
  landmarks_.emplace_back(entity_id);
  ++revision_;
  return true;
}

bool KnowledgeMap::remove_landmark(const KnowledgeGraph& graph, std::string_view entity_id) {
  if (!graph.find_entity(entity_id)) throw UnknownIdError(std::string(entity_id), "landmark");
  if (!erase(landmarks_, entity_id)) return false;
  ++revision_;
  return true;
}

bool KnowledgeMap::star_document(const KnowledgeGraph& graph, std::string_view doc_id) {
  if (graph.find_entity(doc_id)) return add_landmark(graph, doc_id);
  if (!graph.find_document(doc_id)) throw UnknownIdError(std::string(doc_id), "star");
  if (kmap::contains(starred_docs_, doc_id)) return false;
  starred_docs_.emplace_back(doc_id);
  ++revision_;
  return true;
}

bool KnowledgeMap::unstar_document(const KnowledgeGraph& graph, std::string_view doc_id) {
  if (graph.find_entity(doc_id)) return remove_landmark(graph, doc_id);
  if (!graph.find_document(doc_id)) throw UnknownIdError(std::string(doc_id), "star");
  if (!erase(starred_docs_, doc_id)) return false;
  ++revision_;
  return true;
}

void KnowledgeMap::validate_members(const KnowledgeGraph& graph) const {
  for (const auto& id : landmarks_) {
    if (!graph.find_entity(id)) throw UnknownIdError(id, "landmark");
  }
  for (const auto& id : starred_docs_) {
    if (!graph.find_document(id)) throw UnknownIdError(id, "starred document");
  }
}

const RankingSnapshot& KnowledgeMap::refresh(const KnowledgeGraph& graph, const TextIndex& index) {
  validate_members(graph);
  const auto ctx = context();
  RankingSnapshot snap;
  snap.publications = rank_items(graph, index, ctx, "", ItemKind::publication, config_);
  snap.clinical_trials = rank_items(graph, index, ctx, "", ItemKind::clinical_trial, config_);
  snap.fingerprint = fingerprint();
  snap.computed_at = ++sequence_;
  snapshot_ = std::move(snap);
  return *snapshot_;
}

Card KnowledgeMap::build_card(const KnowledgeGraph& graph, const TextIndex& index,
                              std::string_view entity_id) const {
  const LexiconEntry* entry = graph.find_entity(entity_id);
  if (!entry) throw UnknownIdError(std::string(entity_id), "card");
  validate_members(graph);

  Card card;
  card.entity_id = entry->entity_id;
  card.canonical_name = entry->canonical_name;
  card.entity_type = entry->entity_type;
  card.summary = entry->summary;

  std::vector<std::string> members = starred_docs_;
  members.insert(members.end(), landmarks_.begin(), landmarks_.end());

  std::vector<double> restart(graph.node_count(), 0.0);
  const std::size_t self = *graph.node_index(entity_id);
  if (members.empty()) {
    restart[self] = 1.0;
  } else {
    restart[self] += config_.card_entity_share;
    const double each = (1.0 - config_.card_entity_share) / static_cast<double>(members.size());
    for (const auto& id : members) restart[*graph.node_index(id)] += each;
  }
  const auto ppr = personalized_pagerank(graph.adjacency(), restart, config_);

  std::vector<SparseVector> positives;
  std::set<std::string> seen;
  for (const auto& id : members) {
    if (seen.insert(id).second) positives.push_back(index.vector_for(id));
  }
  if (seen.insert(card.entity_id).second) positives.push_back(index.vector_for(card.entity_id));
  const SparseVector centroid = rocchio_centroid({}, positives, config_);

  const auto rank_section = [&](std::vector<std::string> candidates, bool documents) {
    std::vector<double> raw;
    raw.reserve(candidates.size());
    for (const auto& id : candidates) raw.push_back(ppr.scores[*graph.node_index(id)]);
    const auto prox = min_max_normalize(raw);
    std::vector<RankedItem> items;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      RankedItem item;
      item.item_id = candidates[i];
      item.kind = *graph.item_kind(candidates[i]);
      item.graph_prox = prox[i];
      if (documents) {
        item.text_sim = std::clamp(dot(centroid, index.vector_for(candidates[i])), 0.0, 1.0);
        item.score = std::clamp(
            config_.lambda * item.text_sim + (1.0 - config_.lambda) * item.graph_prox, 0.0, 1.0);
      } else {
        item.score = item.graph_prox;
      }
      items.push_back(std::move(item));
    }
    order_and_rank(items);
    if (items.size() > static_cast<std::size_t>(config_.top_k)) items.resize(config_.top_k);
    return items;
  };

  const auto document_candidates = [&](DocKind kind) {
    std::vector<std::string> out;
    for (const auto& doc_id : graph.documents_mentioning(entity_id)) {
      if (graph.find_document(doc_id)->kind != kind) continue;
      if (kmap::contains(starred_docs_, doc_id)) continue;
      out.push_back(doc_id);
    }
    return out;
  };

  const auto entity_candidates = [&](std::initializer_list<EntityType> types) {
    std::set<std::string> found;
    for (EntityType type : types) found.merge(graph.neighbors(entity_id, type, 2));
    std::vector<std::string> out;
    for (const auto& id : found) {
      if (id == card.entity_id || kmap::contains(landmarks_, id)) continue;
      out.push_back(id);
    }
    return out;
  };

  for (const auto name : card_sections_for(entry->entity_type)) {
    CardSection section;
    section.name = std::string(name);
    if (name == kRelatedPublications) {
      section.items = rank_section(document_candidates(DocKind::publication), true);
    } else if (name == kRelatedClinicalTrials) {
      section.items = rank_section(document_candidates(DocKind::clinical_trial), true);
    } else if (name == kAssociatedGenes) {
      section.items = rank_section(entity_candidates({EntityType::gene}), false);
    } else if (name == kAssociatedDrugs) {
      section.items = rank_section(entity_candidates({EntityType::drug}), false);
    } else if (name == kRelatedVariants) {
      section.items = rank_section(entity_candidates({EntityType::variant}), false);
    } else if (name == kRelatedPathways) {
      section.items =
          rank_section(entity_candidates({EntityType::pathway, EntityType::process}), false);
    }
    card.sections.push_back(std::move(section));
  }
  return card;
}

json to_json(const RankingConfig& config) {
  return json{{"alpha", config.alpha},
              {"beta", config.beta},
              {"lambda", config.lambda},
              {"damping", config.damping},
              {"epsilon", config.epsilon},
              {"max_iter", config.max_iter},
              {"top_k", config.top_k},
              {"card_entity_share", config.card_entity_share}};
}

RankingConfig ranking_config_from_json(const json& j, RankingConfig base) {
  if (j.is_null()) return base;
  if (!j.is_object()) throw InvalidArgument("ranking config must be a JSON object");
  try {
    base.alpha = j.value("alpha", base.alpha);
    base.beta = j.value("beta", base.beta);
    base.lambda = j.value("lambda", base.lambda);
    base.damping = j.value("damping", base.damping);
    base.epsilon = j.value("epsilon", base.epsilon);
    base.max_iter = j.value("max_iter", base.max_iter);
    base.top_k = j.value("top_k", base.top_k);
    base.card_entity_share = j.value("card_entity_share", base.card_entity_share);
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("ranking config: ") + e.what());
  }
  base.validate();
  return base;
}

json KnowledgeMap::to_json() const {
  return json{{"map_id", id_},
              {"landmarks", landmarks_},
              {"starred_docs", starred_docs_},
              {"config", kmap::to_json(config_)}};
}

KnowledgeMap KnowledgeMap::from_json(const json& j) {
  if (!j.is_object()) throw InvalidArgument("map file must hold a JSON object");
  KnowledgeMap map(ranking_config_from_json(j.value("config", json{})));
  try {
    if (j.contains("map_id")) map.id_ = j.at("map_id").get<std::string>();
    const auto landmarks = j.value("landmarks", std::vector<std::string>{});
    const auto starred = j.value("starred_docs", std::vector<std::string>{});
    for (const auto& id : landmarks) {
      if (!kmap::contains(map.landmarks_, id)) map.landmarks_.push_back(id);
    }
    for (const auto& id : starred) {
      if (!kmap::contains(map.starred_docs_, id)) map.starred_docs_.push_back(id);
    }
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("map file: ") + e.what());
  }
  if (map.id_.empty()) throw InvalidArgument("map file: empty map_id");
  return map;
}

json to_json(const RankedItem& item) {
  return json{{"item_id", item.item_id},   {"kind", to_string(item.kind)},
              {"score", item.score},       {"text_sim", item.text_sim},
              {"graph_prox", item.graph_prox}, {"rank", item.rank}};
}

namespace {
json items_json(const std::vector<RankedItem>& items) {
  json out = json::array();
  for (const auto& item : items) out.push_back(to_json(item));
  return out;
}
}  // namespace

json to_json(const RankingSnapshot& snapshot) {
  return json{{"computed_at", snapshot.computed_at},
              {"fingerprint", snapshot.fingerprint},
              {"publications", items_json(snapshot.publications)},
              {"clinical_trials", items_json(snapshot.clinical_trials)}};
}

json to_json(const Card& card) {
  json sections = json::array();
  for (const auto& s : card.sections) {
    sections.push_back({{"name", s.name}, {"items", items_json(s.items)}});
  }
  return json{{"entity_id", card.entity_id},
              {"header",
               {{"canonical_name", card.canonical_name},
                {"entity_type", to_string(card.entity_type)},
                {"summary", card.summary}}},
              {"sections", std::move(sections)}};
}

}  // namespace kmap
