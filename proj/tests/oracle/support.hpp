#pragma once

#include <filesystem>

#include "kmap/graph.hpp"
#include "kmap/ingest.hpp"

namespace test {

inline std::filesystem::path fixture_dir() { return KMAP_FIXTURE_DIR; }

/// Fresh empty directory under the build tree.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::path(KMAP_SCRATCH_DIR) / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline const kmap::KnowledgeGraph& fixture_graph() {
  static const kmap::KnowledgeGraph graph = [] {
    const auto f = fixture_dir();
    return kmap::build_graph(kmap::load_documents(f / "documents.jsonl"),
                             kmap::load_lexicon(f / "lexicon.tsv"),
                             kmap::load_relations(f / "relations.tsv"));
  }();
  return graph;
}

}  // namespace test
