#pragma once

// Sentence splitting, tokenization, dictionary mention finding and sentence-level
// co-occurrence relations.

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "kmap/types.hpp"

namespace kmap {

struct Token {
  std::size_t begin = 0;
  std::size_t end = 0;

  bool operator==(const Token&) const = default;
};

/// Letters, digits, apostrophes and hyphens form tokens. Bytes >= 0x80 count as
/// letters so UTF-8 words stay whole.
bool is_token_byte(unsigned char c) noexcept;

std::vector<Token> tokenize(std::string_view text);

/// Splits at '.', '!' or '?' followed by whitespace and then an uppercase ASCII
/// letter or a digit. Sentence indices are 0-based and spans exclude the
/// whitespace between sentences.
std::vector<Sentence> split_sentences(std::string_view body);

/// Title as sentence 0 followed by the body sentences renumbered from 1.
std::vector<Sentence> segment_document(const DocumentRecord& doc);

enum class MatchMode {
  folded,  // ASCII case-folded, hyphens removed
  exact,   // case-sensitive, hyphens removed
};

/// Synonyms of at least four characters (UTF-8 code points) match case-insensitively.
MatchMode match_mode_for(std::string_view synonym) noexcept;

std::size_t codepoint_count(std::string_view text) noexcept;

std::string normalize_token(std::string_view token, MatchMode mode);

/// Tokenizes `text`, normalizes each token and joins the non-empty ones with a
/// single space. Two strings match under `mode` iff their normalized forms are equal.
std::string normalize_phrase(std::string_view text, MatchMode mode);

/// Closed-world dictionary matcher built from a lexicon.
class Gazetteer {
 public:
  explicit Gazetteer(std::span<const LexiconEntry> lexicon);

  /// Leftmost-longest, non-overlapping, token-aligned matches within each
  /// sentence. When several entities share a normalized synonym the
  /// lexicographically smallest entity id wins.
  std::vector<Mention> find_mentions(const DocumentRecord& doc) const;
  std::vector<Mention> find_mentions(const DocumentRecord& doc,
                                     std::span<const Sentence> sentences) const;

  std::size_t max_phrase_tokens() const noexcept { return max_tokens_; }

 private:
  const std::string* lookup(const std::string& key, MatchMode mode) const;

  std::unordered_map<std::string, std::string> folded_;
  std::unordered_map<std::string, std::string> exact_;
  std::size_t max_tokens_ = 0;
};

inline std::vector<Mention> find_mentions(const DocumentRecord& doc, const Gazetteer& gazetteer) {
  return gazetteer.find_mentions(doc);
}

/// One relation per unordered entity pair sharing at least one sentence.
/// confidence = max(0, ln(c(a,b)·D / (c(a)·c(b)))), edge_weight = ln(1 + c(a,b)).
/// Output is sorted by (subject_id, object_id); evidence by (doc_id, sentence_index).
std::vector<Relation> extract_cooccurrence_relations(std::span<const Mention> mentions,
                                                     std::size_t sentence_count);

}  // namespace kmap
