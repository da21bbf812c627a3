#include "kmap/extract.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "kmap/error.hpp"

namespace kmap {
namespace {

bool is_space(unsigned char c) { return c == ' ' || (c >= '\t' && c <= '\r'); }
bool is_upper(unsigned char c) { return c >= 'A' && c <= 'Z'; }
bool is_digit(unsigned char c) { return c >= '0' && c <= '9'; }
bool is_terminator(unsigned char c) { return c == '.' || c == '!' || c == '?'; }

char fold(char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c; }

}  // namespace

bool is_token_byte(unsigned char c) noexcept {
  return (c >= 'a' && c <= 'z') || is_upper(c) || is_digit(c) || c == '\'' || c == '-' ||
         c >= 0x80;
}

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    if (!is_token_byte(static_cast<unsigned char>(text[i]))) {
      ++i;
      continue;
    }
    const std::size_t begin = i;
    while (i < text.size() && is_token_byte(static_cast<unsigned char>(text[i]))) ++i;
    tokens.push_back({begin, i});
  }
  return tokens;
}

std::vector<Sentence> split_sentences(std::string_view body) {
  std::vector<Sentence> sentences;
  const std::size_t n = body.size();
  std::size_t start = 0;
  while (start < n && is_space(static_cast<unsigned char>(body[start]))) ++start;

  auto emit = [&](std::size_t begin, std::size_t end) {
    while (end > begin && is_space(static_cast<unsigned char>(body[end - 1]))) --end;
    if (end > begin) {
      sentences.push_back({"", static_cast<int>(sentences.size()), begin, end});
    }
  };

  for (std::size_t pos = start; pos < n; ++pos) {
    if (!is_terminator(static_cast<unsigned char>(body[pos]))) continue;
    std::size_t next = pos + 1;
    if (next >= n || !is_space(static_cast<unsigned char>(body[next]))) continue;
    while (next < n && is_space(static_cast<unsigned char>(body[next]))) ++next;
    if (next < n && (is_upper(static_cast<unsigned char>(body[next])) ||
                     is_digit(static_cast<unsigned char>(body[next])))) {
      emit(start, pos + 1);
      start = next;
      pos = next - 1;
    }
  }
  if (start < n) emit(start, n);
  return sentences;
}

std::vector<Sentence> segment_document(const DocumentRecord& doc) {
  std::vector<Sentence> sentences;
  sentences.push_back({doc.doc_id, 0, 0, doc.title.size()});
  for (auto s : split_sentences(doc.body)) {
    s.doc_id = doc.doc_id;
    s.index += 1;
    sentences.push_back(std::move(s));
  }
  return sentences;
}

std::size_t codepoint_count(std::string_view text) noexcept {
  return static_cast<std::size_t>(std::count_if(text.begin(), text.end(), [](char c) {
    return (static_cast<unsigned char>(c) & 0xC0) != 0x80;
  }));
}

MatchMode match_mode_for(std::string_view synonym) noexcept {
  return codepoint_count(synonym) >= 4 ? MatchMode::folded : MatchMode::exact;
}

std::string normalize_token(std::string_view token, MatchMode mode) {
  std::string out;
  out.reserve(token.size());
  for (char c : token) {
    if (c == '-') continue;
    out.push_back(mode == MatchMode::folded ? fold(c) : c);
  }
  return out;
}

std::string normalize_phrase(std::string_view text, MatchMode mode) {
  std::string out;
  for (const auto& t : tokenize(text)) {
    auto norm = normalize_token(text.substr(t.begin, t.end - t.begin), mode);
    if (norm.empty()) continue;
    if (!out.empty()) out.push_back(' ');
    out += norm;
  }
  return out;
}

Gazetteer::Gazetteer(std::span<const LexiconEntry> lexicon) {
  for (const auto& entry : lexicon) {
    for (const auto& synonym : entry.synonyms) {
      const MatchMode mode = match_mode_for(synonym);
      std::string key = normalize_phrase(synonym, mode);
      if (key.empty()) continue;
      const auto tokens = static_cast<std::size_t>(std::count(key.begin(), key.end(), ' ')) + 1;
      max_tokens_ = std::max(max_tokens_, tokens);
      auto& table = mode == MatchMode::folded ? folded_ : exact_;
      auto [it, inserted] = table.emplace(std::move(key), entry.entity_id);
      if (!inserted && entry.entity_id < it->second) it->second = entry.entity_id;
    }
  }
}

const std::string* Gazetteer::lookup(const std::string& key, MatchMode mode) const {
  const auto& table = mode == MatchMode::folded ? folded_ : exact_;
  auto it = table.find(key);
  return it == table.end() ? nullptr : &it->second;
}

std::vector<Mention> Gazetteer::find_mentions(const DocumentRecord& doc) const {
  return find_mentions(doc, segment_document(doc));
}

std::vector<Mention> Gazetteer::find_mentions(const DocumentRecord& doc,
                                              std::span<const Sentence> sentences) const {
  std::vector<Mention> mentions;
  if (max_tokens_ == 0) return mentions;

  for (const auto& sentence : sentences) {
    const std::string_view source = sentence_source(doc, sentence.index);
    const std::string_view text =
        source.substr(sentence.char_start, sentence.char_end - sentence.char_start);
    const auto tokens = tokenize(text);

    std::vector<std::string> folded(tokens.size());
    std::vector<std::string> exact(tokens.size());
    for (std::size_t t = 0; t < tokens.size(); ++t) {
      const auto raw = text.substr(tokens[t].begin, tokens[t].end - tokens[t].begin);
      folded[t] = normalize_token(raw, MatchMode::folded);
      exact[t] = normalize_token(raw, MatchMode::exact);
    }

    std::size_t i = 0;
    while (i < tokens.size()) {
      if (folded[i].empty()) {
        ++i;
        continue;
      }
      std::string folded_key;
      std::string exact_key;
      std::size_t used = 0;
      std::size_t best_end = 0;  // exclusive token index of the longest match
      const std::string* best_id = nullptr;
      for (std::size_t j = i; j < tokens.size() && used < max_tokens_; ++j) {
        if (folded[j].empty()) continue;
        if (used > 0) {
          folded_key.push_back(' ');
          exact_key.push_back(' ');
        }
        folded_key += folded[j];
        exact_key += exact[j];
        ++used;
        const std::string* a = lookup(folded_key, MatchMode::folded);
        const std::string* b = lookup(exact_key, MatchMode::exact);
        const std::string* hit = a && b ? (*b < *a ? b : a) : (a ? a : b);
        if (hit) {
          best_end = j + 1;
          best_id = hit;
        }
      }
      if (!best_id) {
        ++i;
        continue;
      }
      const std::size_t begin = sentence.char_start + tokens[i].begin;
      const std::size_t end = sentence.char_start + tokens[best_end - 1].end;
      mentions.push_back({*best_id, doc.doc_id, sentence.index, begin, end,
                          std::string(source.substr(begin, end - begin))});
      i = best_end;
    }
  }
  return mentions;
}

std::vector<Relation> extract_cooccurrence_relations(std::span<const Mention> mentions,
                                                     std::size_t sentence_count) {
  std::map<Evidence, std::set<std::string>> by_sentence;
  for (const auto& m : mentions) by_sentence[{m.doc_id, m.sentence_index}].insert(m.entity_id);
  if (by_sentence.size() > sentence_count) {
    throw InvalidArgument("sentence count " + std::to_string(sentence_count) +
                          " is smaller than the number of sentences with mentions (" +
                          std::to_string(by_sentence.size()) + ")");
  }

  std::map<std::string, std::size_t> entity_count;
  std::map<std::pair<std::string, std::string>, std::vector<Evidence>> pair_evidence;
  for (const auto& [where, entities] : by_sentence) {
    for (auto a = entities.begin(); a != entities.end(); ++a) {
      ++entity_count[*a];
      for (auto b = std::next(a); b != entities.end(); ++b) {
        pair_evidence[{*a, *b}].push_back(where);
      }
    }
  }

  const double d = static_cast<double>(sentence_count);
  std::vector<Relation> relations;
  relations.reserve(pair_evidence.size());
  for (auto& [pair, evidence] : pair_evidence) {
    const double joint = static_cast<double>(evidence.size());
    const double ca = static_cast<double>(entity_count[pair.first]);
    const double cb = static_cast<double>(entity_count[pair.second]);
    Relation r;
    r.subject_id = pair.first;
    r.object_id = pair.second;
    r.kind = RelationKind::cooccurrence;
    r.predicate = std::string(kCooccursWith);
    r.confidence = std::max(0.0, std::log(joint * d / (ca * cb)));
    r.edge_weight = std::log(1.0 + joint);
    r.evidence = std::move(evidence);
    r.source = "cooccurrence";
    relations.push_back(std::move(r));
  }
  return relations;
}

}  // namespace kmap
