#pragma once

// Proximity ranking: TF-IDF cosine against a Rocchio centroid fused with
// personalized PageRank restarted at the knowledge-map members.

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kmap/graph.hpp"
#include "kmap/types.hpp"

namespace kmap {

struct RankingConfig {
  double alpha = 1.0;     // query retention
  double beta = 0.75;     // positive-feedback weight
  double lambda = 0.5;    // weight on the text term when fusing
  double damping = 0.85;  // PageRank damping, in (0, 1)
  double epsilon = 1e-9;  // L1 convergence threshold
  int max_iter = 100;
  int top_k = 20;
  /// Restart mass placed on the card entity when ranking card sections.
  double card_entity_share = 0.5;

  /// Throws InvalidArgument when a field is out of range.
  void validate() const;

  bool operator==(const RankingConfig&) const = default;
};

struct SparseEntry {
  std::uint32_t term = 0;
  double value = 0.0;

  bool operator==(const SparseEntry&) const = default;
};

/// Sparse vector with entries sorted by strictly increasing term id.
using SparseVector = std::vector<SparseEntry>;

double dot(const SparseVector& a, const SparseVector& b);
double l2_norm(const SparseVector& v);
/// Unit-length copy; the zero vector stays zero.
SparseVector normalized(const SparseVector& v);
/// Returns a + scale * b.
SparseVector add_scaled(const SparseVector& a, const SparseVector& b, double scale);

/// TF-IDF index over documents (title + body) and entity pseudo-documents
/// (canonical name, synonyms, summary). Terms are tokenizer tokens, case-folded
/// with hyphens removed; no stop words.
class TextIndex {
 public:
  TextIndex() = default;

  static TextIndex build(const KnowledgeGraph& graph);

  /// Unit TF-IDF vector of arbitrary text; unknown terms are ignored.
  SparseVector vectorize(std::string_view text) const;

  /// Stored vector of a graph node; empty for unknown ids.
  const SparseVector& vector_for(std::string_view node_id) const;

  std::optional<double> idf(std::string_view term) const;
  std::optional<std::uint32_t> term_id(std::string_view term) const;
  std::size_t vocabulary_size() const noexcept { return vocabulary_.size(); }
  /// Number of indexed items with non-empty text.
  std::size_t item_count() const noexcept { return item_count_; }

 private:
  SparseVector weigh(const std::map<std::uint32_t, double>& counts) const;

  std::map<std::string, std::uint32_t, std::less<>> vocabulary_;
  std::vector<double> idf_;
  std::map<std::string, SparseVector, std::less<>> vectors_;
  std::size_t item_count_ = 0;
};

/// Text used for a document in the index.
std::string document_text(const DocumentRecord& doc);
/// Pseudo-document text of an entity.
std::string entity_text(const LexiconEntry& entry);
/// Index term for a token.
std::string index_term(std::string_view token);

/// normalize(alpha·q0 + (beta/|P|)·Σ p); positive feedback only.
SparseVector rocchio_centroid(const SparseVector& query, std::span<const SparseVector> positives,
                              const RankingConfig& config);

struct PageRankResult {
  std::vector<double> scores;
  int iterations = 0;
  double last_delta = 0.0;
};

/// Power iteration r <- (1-d)·e + d·Pᵀr over the symmetric adjacency, where P
/// row-normalizes edge weights and the mass of zero-strength nodes is returned
/// to `restart`. `restart` must be a non-negative distribution over the nodes.
PageRankResult personalized_pagerank(const Adjacency& adjacency, std::span<const double> restart,
                                     const RankingConfig& config);

/// Uniform restart over `restart_set`. Throws InvalidArgument on an empty set
/// and UnknownIdError on ids missing from the graph.
std::map<std::string, double> personalized_pagerank(const KnowledgeGraph& graph,
                                                    const std::set<std::string>& restart_set,
                                                    const RankingConfig& config);

/// Min-max normalization to [0,1]; all-equal inputs normalize to 0.
std::vector<double> min_max_normalize(std::span<const double> values);

/// Knowledge-map membership as seen by the ranker.
struct MapContext {
  std::vector<std::string> landmarks;     // entity ids
  std::vector<std::string> starred_docs;  // document ids

  bool empty() const noexcept { return landmarks.empty() && starred_docs.empty(); }
};

struct RankedItem {
  std::string item_id;
  ItemKind kind = ItemKind::publication;
  double score = 0.0;
  double text_sim = 0.0;
  double graph_prox = 0.0;
  int rank = 0;

  bool operator==(const RankedItem&) const = default;
};

/// Sorts by score descending, ties by ascending id, and assigns ranks 1..n.
void order_and_rank(std::vector<RankedItem>& items);

/// Ranks all items of `kind_filter` (every kind when absent) that are not in the map.
/// score = lambda·text_sim + (1-lambda)·graph_prox for a non-empty map, text_sim otherwise.
std::vector<RankedItem> rank_items(const KnowledgeGraph& graph, const TextIndex& index,
                                   const MapContext& map, std::string_view query_text,
                                   std::optional<ItemKind> kind_filter, const RankingConfig& config);

}  // namespace kmap
