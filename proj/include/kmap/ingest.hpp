#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "kmap/graph.hpp"
#include "kmap/types.hpp"

namespace kmap {

/// JSON Lines, one document per line. Blank lines are skipped; unknown keys are ignored.
std::vector<DocumentRecord> load_documents(const std::filesystem::path& path);
std::vector<DocumentRecord> parse_documents(std::istream& in, const std::string& source_name);

/// TSV without header: entity_id, entity_type, canonical_name, synonyms ('|'-separated),
/// summary, source.
std::vector<LexiconEntry> load_lexicon(const std::filesystem::path& path);
std::vector<LexiconEntry> parse_lexicon(std::istream& in, const std::string& source_name);

/// TSV without header: subject_id, object_id, predicate, confidence, source.
std::vector<CuratedRelationRecord> load_relations(const std::filesystem::path& path);
std::vector<CuratedRelationRecord> parse_relations(std::istream& in,
                                                   const std::string& source_name);

/// Fixed edge weight given to every curated relation.
double curated_edge_weight();

/// Runs mention finding on every document, co-occurrence extraction over the
/// corpus, merges curated relations and assembles the graph.
KnowledgeGraph build_graph(std::vector<DocumentRecord> documents,
                           std::vector<LexiconEntry> lexicon,
                           const std::vector<CuratedRelationRecord>& curated);

/// Loads the inputs, builds the graph and persists it to `out_dir`.
KnowledgeGraph ingest_corpus(const std::filesystem::path& docs_path,
                             const std::filesystem::path& lexicon_path,
                             const std::optional<std::filesystem::path>& relations_path,
                             const std::filesystem::path& out_dir);

}  // namespace kmap
