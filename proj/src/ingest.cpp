#include "kmap/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <regex>
#include <set>

#include "kmap/error.hpp"
#include "kmap/extract.hpp"
#include "kmap/serialize.hpp"

namespace kmap {
namespace {

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  return in;
}

std::string_view trim(std::string_view s) {
  const auto is_ws = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
  while (!s.empty() && is_ws(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_ws(s.back())) s.remove_suffix(1);
  return s;
}

bool blank(std::string_view line) { return trim(line).empty(); }

std::vector<std::string> split(std::string_view line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.emplace_back(line.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

DocumentRecord parse_document_line(const std::string& line, const std::string& source,
                                   std::size_t line_no) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    throw ParseError(source, line_no, std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ParseError(source, line_no, "expected a JSON object");

  const auto require_string = [&](const char* key) {
    auto it = j.find(key);
    if (it == j.end() || !it->is_string()) {
      throw ParseError(source, line_no, std::string("missing or non-string '") + key + "'");
    }
    return it->get<std::string>();
  };

  DocumentRecord doc;
  doc.doc_id = require_string("doc_id");
  if (doc.doc_id.empty()) throw ParseError(source, line_no, "empty doc_id");
  const auto kind = require_string("kind");
  auto parsed_kind = parse_doc_kind(kind);
  if (!parsed_kind) throw ParseError(source, line_no, "unknown kind '" + kind + "'");
  doc.kind = *parsed_kind;
  doc.title = require_string("title");
  if (trim(doc.title).empty()) throw ParseError(source, line_no, "empty title");

  try {
    if (auto it = j.find("authors"); it != j.end()) {
      doc.authors = it->get<std::vector<std::string>>();
    }
    if (auto it = j.find("date"); it != j.end() && !it->is_null()) {
      doc.date = it->get<std::string>();
      static const std::regex kIsoDate(R"(\d{4}-\d{2}-\d{2})");
      if (!std::regex_match(*doc.date, kIsoDate)) {
        throw ParseError(source, line_no, "date '" + *doc.date + "' is not YYYY-MM-DD");
      }
    }
    if (auto it = j.find("body"); it != j.end()) doc.body = it->get<std::string>();
    if (auto it = j.find("metadata"); it != j.end()) {
      doc.metadata = it->get<std::map<std::string, std::vector<std::string>>>();
    }
  } catch (const json::exception& e) {
    throw ParseError(source, line_no, std::string("invalid field type: ") + e.what());
  }

  if (doc.kind == DocKind::clinical_trial) {
    const auto colon = doc.doc_id.find(':');
    const std::string suffix =
        colon == std::string::npos ? doc.doc_id : doc.doc_id.substr(colon + 1);
    auto nct = doc.metadata.find("nct");
    if (nct == doc.metadata.end() || nct->second.empty() || nct->second.front() != suffix) {
      throw ParseError(source, line_no,
                       "clinical trial '" + doc.doc_id + "' needs metadata nct = [\"" + suffix +
                           "\"]");
    }
  }
  return doc;
}

}  // namespace

std::vector<DocumentRecord> parse_documents(std::istream& in, const std::string& source_name) {
  std::vector<DocumentRecord> docs;
  std::set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    auto doc = parse_document_line(line, source_name, line_no);
    if (!seen.insert(doc.doc_id).second) {
      throw ParseError(source_name, line_no, "duplicate doc_id '" + doc.doc_id + "'");
    }
    docs.push_back(std::move(doc));
  }
  if (in.bad()) throw IoError("failed reading '" + source_name + "'");
  return docs;
}

std::vector<DocumentRecord> load_documents(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_documents(in, path.string());
}

std::vector<LexiconEntry> parse_lexicon(std::istream& in, const std::string& source_name) {
  std::vector<LexiconEntry> entries;
  std::set<std::string> seen;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = strip_cr(raw);
    if (blank(line)) continue;
    const auto cols = split(line, '\t');
    if (cols.size() != 6) {
      throw ParseError(source_name, line_no,
                       "expected 6 tab-separated columns, found " + std::to_string(cols.size()));
    }
    LexiconEntry entry;
    entry.entity_id = std::string(trim(cols[0]));
    if (entry.entity_id.empty()) throw ParseError(source_name, line_no, "empty entity_id");
    const auto type_name = std::string(trim(cols[1]));
    auto type = parse_entity_type(type_name);
    if (!type) throw ParseError(source_name, line_no, "unknown entity_type '" + type_name + "'");
    entry.entity_type = *type;
    entry.canonical_name = std::string(trim(cols[2]));
    if (entry.canonical_name.empty()) {
      throw ParseError(source_name, line_no, "empty canonical_name");
    }
    for (const auto& s : split(cols[3], '|')) {
      auto synonym = std::string(trim(s));
      if (synonym.empty()) continue;
      if (std::find(entry.synonyms.begin(), entry.synonyms.end(), synonym) ==
          entry.synonyms.end()) {
        entry.synonyms.push_back(std::move(synonym));
      }
    }
    if (std::find(entry.synonyms.begin(), entry.synonyms.end(), entry.canonical_name) ==
        entry.synonyms.end()) {
      entry.synonyms.push_back(entry.canonical_name);
    }
    entry.summary = std::string(trim(cols[4]));
    entry.source = std::string(trim(cols[5]));
    if (!seen.insert(entry.entity_id).second) {
      throw ParseError(source_name, line_no, "duplicate entity_id '" + entry.entity_id + "'");
    }
    entries.push_back(std::move(entry));
  }
  if (in.bad()) throw IoError("failed reading '" + source_name + "'");
  return entries;
}

std::vector<LexiconEntry> load_lexicon(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_lexicon(in, path.string());
}

std::vector<CuratedRelationRecord> parse_relations(std::istream& in,
                                                   const std::string& source_name) {
  std::vector<CuratedRelationRecord> records;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = strip_cr(raw);
    if (blank(line)) continue;
    const auto cols = split(line, '\t');
    if (cols.size() != 5) {
      throw ParseError(source_name, line_no,
                       "expected 5 tab-separated columns, found " + std::to_string(cols.size()));
    }
    CuratedRelationRecord r;
    r.subject_id = std::string(trim(cols[0]));
    r.object_id = std::string(trim(cols[1]));
    r.predicate = std::string(trim(cols[2]));
    r.source = std::string(trim(cols[4]));
    if (r.subject_id.empty() || r.object_id.empty() || r.predicate.empty()) {
      throw ParseError(source_name, line_no, "empty subject, object or predicate");
    }
    if (r.subject_id == r.object_id) {
      throw ParseError(source_name, line_no, "relation of '" + r.subject_id + "' to itself");
    }
    const auto conf = trim(cols[3]);
    const auto [ptr, ec] = std::from_chars(conf.data(), conf.data() + conf.size(), r.confidence);
    if (ec != std::errc{} || ptr != conf.data() + conf.size() || !(r.confidence >= 0.0) ||
        r.confidence > 1.0) {
      throw ParseError(source_name, line_no,
                       "confidence '" + std::string(conf) + "' is not a number in [0,1]");
    }
    records.push_back(std::move(r));
  }
  if (in.bad()) throw IoError("failed reading '" + source_name + "'");
  return records;
}

std::vector<CuratedRelationRecord> load_relations(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_relations(in, path.string());
}

double curated_edge_weight() { return std::log(2.0); }

KnowledgeGraph build_graph(std::vector<DocumentRecord> documents,
                           std::vector<LexiconEntry> lexicon,
                           const std::vector<CuratedRelationRecord>& curated) {
  const Gazetteer gazetteer(lexicon);

  std::vector<Mention> mentions;
  std::size_t sentence_count = 0;
  for (const auto& doc : documents) {
    const auto sentences = segment_document(doc);
    sentence_count += sentences.size();
    auto found = gazetteer.find_mentions(doc, sentences);
    mentions.insert(mentions.end(), std::make_move_iterator(found.begin()),
                    std::make_move_iterator(found.end()));
  }

  auto relations = extract_cooccurrence_relations(mentions, sentence_count);

  std::set<std::string> known;
  for (const auto& e : lexicon) known.insert(e.entity_id);
  for (const auto& c : curated) {
    for (const auto* id : {&c.subject_id, &c.object_id}) {
      if (!known.count(*id)) throw UnknownIdError(*id, "curated relation");
    }
    if (c.subject_id == c.object_id) {
      throw IntegrityError("curated relation of '" + c.subject_id + "' to itself");
    }
    Relation r;
    r.subject_id = std::min(c.subject_id, c.object_id);
    r.object_id = std::max(c.subject_id, c.object_id);
    r.kind = RelationKind::curated;
    r.predicate = c.predicate;
    r.confidence = c.confidence;
    r.edge_weight = curated_edge_weight();
    r.source = c.source;
    relations.push_back(std::move(r));
  }

  return KnowledgeGraph::assemble(std::move(lexicon), std::move(documents), std::move(mentions),
                                  std::move(relations));
}

KnowledgeGraph ingest_corpus(const std::filesystem::path& docs_path,
                             const std::filesystem::path& lexicon_path,
                             const std::optional<std::filesystem::path>& relations_path,
                             const std::filesystem::path& out_dir) {
  auto documents = load_documents(docs_path);
  auto lexicon = load_lexicon(lexicon_path);
  std::vector<CuratedRelationRecord> curated;
  if (relations_path) curated = load_relations(*relations_path);
  auto graph = build_graph(std::move(documents), std::move(lexicon), curated);
  save_graph(graph, out_dir);
  return graph;
}

}  // namespace kmap
