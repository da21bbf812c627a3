#include "kmap/rank.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "kmap/error.hpp"
#include "kmap/extract.hpp"

namespace kmap {

void RankingConfig::validate() const {
  const auto fail = [](const std::string& what) { throw InvalidArgument("ranking config: " + what); };
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) fail("alpha must be >= 0");
  if (!(beta >= 0.0) || !std::isfinite(beta)) fail("beta must be >= 0");
  if (!(lambda >= 0.0 && lambda <= 1.0)) fail("lambda must lie in [0,1]");
  if (!(damping > 0.0 && damping < 1.0)) fail("damping must lie in (0,1)");
  if (!(epsilon > 0.0)) fail("epsilon must be > 0");
  if (max_iter < 1) fail("max_iter must be >= 1");
  if (top_k < 1) fail("top_k must be >= 1");
  if (!(card_entity_share >= 0.0 && card_entity_share <= 1.0)) {
    fail("card_entity_share must lie in [0,1]");
  }
}

// Sparse vectors ------------------------------------------------------------

double dot(const SparseVector& a, const SparseVector& b) {
  double sum = 0.0;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (i->term < j->term) {
      ++i;
    } else if (j->term < i->term) {
      ++j;
    } else {
      sum += i->value * j->value;
      ++i;
      ++j;
    }
  }
  return sum;
}

double l2_norm(const SparseVector& v) {
  double sum = 0.0;
  for (const auto& e : v) sum += e.value * e.value;
  return std::sqrt(sum);
}

SparseVector normalized(const SparseVector& v) {
  const double norm = l2_norm(v);
  if (norm == 0.0) return {};
  SparseVector out;
  out.reserve(v.size());
  for (const auto& e : v) out.push_back({e.term, e.value / norm});
  return out;
}

SparseVector add_scaled(const SparseVector& a, const SparseVector& b, double scale) {
  SparseVector out;
  out.reserve(a.size() + b.size());
  auto push = [&](std::uint32_t term, double value) {
    if (value != 0.0) out.push_back({term, value});
  };
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() || j != b.end()) {
    if (j == b.end() || (i != a.end() && i->term < j->term)) {
      push(i->term, i->value);
      ++i;
    } else if (i == a.end() || j->term < i->term) {
      push(j->term, scale * j->value);
      ++j;
    } else {
      push(i->term, i->value + scale * j->value);
      ++i;
      ++j;
    }
  }
  return out;
}

// Text index ----------------------------------------------------------------

std::string document_text(const DocumentRecord& doc) { return doc.title + "\n" + doc.body; }

std::string entity_text(const LexiconEntry& entry) {
  std::string text = entry.canonical_name;
  for (const auto& s : entry.synonyms) text += "\n" + s;
  if (!entry.summary.empty()) text += "\n" + entry.summary;
  return text;
}

std::string index_term(std::string_view token) {
  return normalize_token(token, MatchMode::folded);
}

namespace {

std::map<std::string, double> term_counts(std::string_view text) {
  std::map<std::string, double> counts;
  for (const auto& t : tokenize(text)) {
    auto term = index_term(text.substr(t.begin, t.end - t.begin));
    if (!term.empty()) counts[std::move(term)] += 1.0;
  }
  return counts;
}

}  // namespace

TextIndex TextIndex::build(const KnowledgeGraph& graph) {
  std::vector<std::pair<std::string, std::map<std::string, double>>> items;
  for (const auto& [id, doc] : graph.documents()) items.emplace_back(id, term_counts(document_text(doc)));
  for (const auto& [id, entry] : graph.entities()) items.emplace_back(id, term_counts(entity_text(entry)));

  TextIndex index;
  std::map<std::string, std::size_t> df;
  for (const auto& [id, counts] : items) {
    if (counts.empty()) continue;
    ++index.item_count_;
    for (const auto& [term, _] : counts) ++df[term];
  }
  std::uint32_t next = 0;
  index.idf_.reserve(df.size());
  const double n = static_cast<double>(index.item_count_);
  for (const auto& [term, freq] : df) {
    index.vocabulary_.emplace(term, next++);
    index.idf_.push_back(std::log((1.0 + n) / (1.0 + static_cast<double>(freq))) + 1.0);
  }
  for (const auto& [id, counts] : items) {
    std::map<std::uint32_t, double> by_id;
    for (const auto& [term, tf] : counts) by_id[index.vocabulary_.at(term)] = tf;
    index.vectors_.emplace(id, index.weigh(by_id));
  }
  return index;
}

SparseVector TextIndex::weigh(const std::map<std::uint32_t, double>& counts) const {
  SparseVector v;
  v.reserve(counts.size());
  for (const auto& [term, tf] : counts) v.push_back({term, tf * idf_[term]});
  return normalized(v);
}

SparseVector TextIndex::vectorize(std::string_view text) const {
  std::map<std::uint32_t, double> counts;
  for (const auto& t : tokenize(text)) {
    const auto term = index_term(text.substr(t.begin, t.end - t.begin));
    auto it = vocabulary_.find(term);
    if (it != vocabulary_.end()) counts[it->second] += 1.0;
  }
  return weigh(counts);
}

const SparseVector& TextIndex::vector_for(std::string_view node_id) const {
  static const SparseVector kEmpty;
  auto it = vectors_.find(node_id);
  return it == vectors_.end() ? kEmpty : it->second;
}

std::optional<std::uint32_t> TextIndex::term_id(std::string_view term) const {
  auto it = vocabulary_.find(term);
  if (it == vocabulary_.end()) return std::nullopt;
  return it->second;
}

std::optional<double> TextIndex::idf(std::string_view term) const {
  auto id = term_id(term);
  if (!id) return std::nullopt;
  return idf_[*id];
}

// Rocchio -------------------------------------------------------------------

SparseVector rocchio_centroid(const SparseVector& query, std::span<const SparseVector> positives,
                              const RankingConfig& config) {
  SparseVector combined = add_scaled({}, query, config.alpha);
  if (!positives.empty()) {
    SparseVector sum;
    for (const auto& p : positives) sum = add_scaled(sum, p, 1.0);
    combined = add_scaled(combined, sum, config.beta / static_cast<double>(positives.size()));
  }
  return normalized(combined);
}

// Personalized PageRank -----------------------------------------------------

PageRankResult personalized_pagerank(const Adjacency& adjacency, std::span<const double> restart,
                                     const RankingConfig& config) {
  const std::size_t n = adjacency.size();
  if (restart.size() != n) throw InvalidArgument("restart vector size does not match the graph");
  double mass = 0.0;
  for (double x : restart) {
    if (!(x >= 0.0) || !std::isfinite(x)) throw InvalidArgument("restart weights must be >= 0");
    mass += x;
  }
  if (!(mass > 0.0)) throw InvalidArgument("restart distribution is empty");

  std::vector<double> teleport(restart.begin(), restart.end());
  for (double& x : teleport) x /= mass;

  const double d = config.damping;
  PageRankResult result;
  std::vector<double> r = teleport;
  std::vector<double> next(n);
  while (result.iterations < config.max_iter) {
    std::fill(next.begin(), next.end(), 0.0);
    double dangling = 0.0;
    for (std::size_t u = 0; u < n; ++u) {
      if (r[u] == 0.0) continue;
      const double s = adjacency.strength(u);
      if (s == 0.0) {
        dangling += r[u];
        continue;
      }
      const double share = r[u] / s;
      for (const auto& arc : adjacency.arcs(u)) next[arc.target] += share * arc.weight;
    }
    double delta = 0.0;
    for (std::size_t v = 0; v < n; ++v) {
      next[v] = (1.0 - d) * teleport[v] + d * next[v] + d * dangling * teleport[v];
      delta += std::abs(next[v] - r[v]);
    }
    r.swap(next);
    ++result.iterations;
    result.last_delta = delta;
    if (delta < config.epsilon) break;
  }

  const double total = std::accumulate(r.begin(), r.end(), 0.0);
  for (double& x : r) x /= total;
  result.scores = std::move(r);
  return result;
}

std::map<std::string, double> personalized_pagerank(const KnowledgeGraph& graph,
                                                    const std::set<std::string>& restart_set,
                                                    const RankingConfig& config) {
  if (restart_set.empty()) throw InvalidArgument("restart set is empty");
  std::vector<double> restart(graph.node_count(), 0.0);
  for (const auto& id : restart_set) {
    auto index = graph.node_index(id);
    if (!index) throw UnknownIdError(id, "restart set");
    restart[*index] = 1.0;
  }
  const auto result = personalized_pagerank(graph.adjacency(), restart, config);
  std::map<std::string, double> scores;
  for (std::size_t i = 0; i < result.scores.size(); ++i) {
    scores.emplace(graph.node_id(i), result.scores[i]);
  }
  return scores;
}

std::vector<double> min_max_normalize(std::span<const double> values) {
  std::vector<double> out(values.size(), 0.0);
  if (values.empty()) return out;
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  const double range = *hi - *lo;
  if (!(range > 0.0)) return out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    out[i] = std::clamp((values[i] - *lo) / range, 0.0, 1.0);
  }
  return out;
}

// Ranking -------------------------------------------------------------------

void order_and_rank(std::vector<RankedItem>& items) {
  std::sort(items.begin(), items.end(), [](const RankedItem& a, const RankedItem& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.item_id < b.item_id;
  });
  for (std::size_t i = 0; i < items.size(); ++i) items[i].rank = static_cast<int>(i) + 1;
}

std::vector<RankedItem> rank_items(const KnowledgeGraph& graph, const TextIndex& index,
                                   const MapContext& map, std::string_view query_text,
                                   std::optional<ItemKind> kind_filter,
                                   const RankingConfig& config) {
  config.validate();
  std::set<std::string> members;
  std::vector<SparseVector> positives;
  std::vector<double> restart(graph.node_count(), 0.0);
  for (const auto& id : map.starred_docs) {
    if (!graph.find_document(id)) throw UnknownIdError(id, "starred document");
    if (members.insert(id).second) positives.push_back(index.vector_for(id));
  }
  for (const auto& id : map.landmarks) {
    if (!graph.find_entity(id)) throw UnknownIdError(id, "landmark");
    if (members.insert(id).second) positives.push_back(index.vector_for(id));
  }
  for (const auto& id : members) restart[*graph.node_index(id)] = 1.0;

  const SparseVector centroid = rocchio_centroid(index.vectorize(query_text), positives, config);

  std::vector<RankedItem> items;
  std::vector<std::size_t> nodes;
  for (std::size_t i = 0; i < graph.node_count(); ++i) {
    const auto& id = graph.node_id(i);
    const ItemKind kind = *graph.item_kind(id);
    if (kind_filter && kind != *kind_filter) continue;
    if (members.count(id)) continue;
    RankedItem item;
    item.item_id = id;
    item.kind = kind;
    item.text_sim = std::clamp(dot(centroid, index.vector_for(id)), 0.0, 1.0);
    items.push_back(std::move(item));
    nodes.push_back(i);
  }

  if (map.empty()) {
    for (auto& item : items) item.score = item.text_sim;
  } else {
    const auto ppr = personalized_pagerank(graph.adjacency(), restart, config);
    std::vector<double> raw(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) raw[i] = ppr.scores[nodes[i]];
    const auto prox = min_max_normalize(raw);
    for (std::size_t i = 0; i < items.size(); ++i) {
      items[i].graph_prox = prox[i];
      items[i].score = std::clamp(
          config.lambda * items[i].text_sim + (1.0 - config.lambda) * prox[i], 0.0, 1.0);
    }
  }

  order_and_rank(items);
  if (items.size() > static_cast<std::size_t>(config.top_k)) items.resize(config.top_k);
  return items;
}

}  // namespace kmap
