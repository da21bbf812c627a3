#pragma once

// Synthetic corpora and a simulated expert who stars relevant documents, used to
// measure how ranking quality evolves with feedback.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "kmap/graph.hpp"
#include "kmap/rank.hpp"
#include "kmap/serialize.hpp"
#include "kmap/types.hpp"

namespace kmap {

struct SyntheticCorpusSpec {
  std::uint64_t seed = 1;
  int topics = 4;
  int entities_per_topic = 6;
  int docs_per_topic = 10;
  int entities_per_doc = 2;  // topic entities a document focuses on
  int vocabulary_size = 300;
  double noise_rate = 0.6;      // probability that a token is a noise word
  double contamination = 0.1;  // probability that an entity token comes from another topic
  int sentences_per_doc = 4;
  int tokens_per_sentence = 8;

  void validate() const;

  static SyntheticCorpusSpec from_json(const json& j);
  json to_json() const;
};

struct SyntheticCorpus {
  std::vector<DocumentRecord> documents;
  std::vector<LexiconEntry> lexicon;
  std::map<std::string, int> doc_topic;
  /// Entity ids per topic, in generation order.
  std::vector<std::vector<std::string>> topic_entities;

  std::set<std::string> relevant_docs(int topic) const;
};

SyntheticCorpus generate_corpus(const SyntheticCorpusSpec& spec);

struct MetricsRow {
  int iteration = 0;
  double precision_at_k = 0.0;
  double recall_at_k = 0.0;
  int starred = 0;  // relevant documents starred before this iteration's refresh

  bool operator==(const MetricsRow&) const = default;
};

using MetricsTable = std::vector<MetricsRow>;

/// Relevant hits in the first k entries divided by k.
double precision_at_k(std::span<const std::string> ranked, const std::set<std::string>& relevant,
                      int k);
/// Relevant hits in the first k entries divided by the number of relevant items.
double recall_at_k(std::span<const std::string> ranked, const std::set<std::string>& relevant,
                   int k);

/// Starts a fresh map holding the first entity of `seed_topic`. Each iteration
/// refreshes, scores the list (starred documents in star order followed by the
/// publication snapshot) and then stars the best-ranked relevant unstarred
/// document. Stops early once no relevant document is left to star.
MetricsTable simulate_session(const SyntheticCorpus& corpus, const KnowledgeGraph& graph,
                              int seed_topic, int iterations, int k,
                              const RankingConfig& config = {});

MetricsTable simulate_session(const SyntheticCorpus& corpus, int seed_topic, int iterations,
                              int k, const RankingConfig& config = {});

struct SimulationRun {
  std::uint64_t seed = 0;
  MetricsTable table;
};

/// Runs `runs` corpora with seeds spec.seed, spec.seed + 1, ... on topic 0.
std::vector<SimulationRun> simulate_runs(const SyntheticCorpusSpec& spec, int runs,
                                         int iterations, int k, const RankingConfig& config = {});

/// Columns: run, iteration, precision_at_k, recall_at_k, starred.
void write_metrics_csv(std::ostream& out, std::span<const SimulationRun> runs);

/// Mean precision@k at `iteration` over the runs that reached it.
double mean_precision_at(std::span<const SimulationRun> runs, int iteration);

}  // namespace kmap
