#include "kmap/simulate.hpp"

#include <algorithm>
#include <future>
#include <iomanip>
#include <ostream>
#include <random>

#include "kmap/error.hpp"
#include "kmap/ingest.hpp"
#include "kmap/session.hpp"

namespace kmap {
namespace {

// Distributions are written out by hand so corpora are identical across
// standard library implementations; mt19937_64 itself is fully specified.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::size_t index(std::size_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x = engine_();
    while (x >= limit) x = engine_();
    return static_cast<std::size_t>(x % n);
  }

  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[index(i)]);
  }

 private:
  std::mt19937_64 engine_;
};

constexpr const char* kSyllables[] = {"ba", "ko", "ri", "mu", "te", "sa", "lo", "ne",
                                      "pi", "du", "ga", "ve", "zo", "hi", "fu", "ya"};
constexpr std::size_t kSyllableCount = std::size(kSyllables);

std::string noise_word(std::size_t i) {
  std::string word;
  do {
    word += kSyllables[i % kSyllableCount];
    i /= kSyllableCount;
  } while (i > 0);
  return word + "n";
}

std::string letters(std::size_t i) {
  std::string out;
  do {
    out.insert(out.begin(), static_cast<char>('A' + i % 26));
    i /= 26;
  } while (i > 0);
  return out;
}

constexpr EntityType kEntityCycle[] = {EntityType::gene,    EntityType::drug,
                                       EntityType::protein, EntityType::pathway,
                                       EntityType::process, EntityType::variant};

std::string capitalized(std::string word) {
  if (!word.empty() && word[0] >= 'a' && word[0] <= 'z') word[0] = static_cast<char>(word[0] - 32);
  return word;
}

}  // namespace

void SyntheticCorpusSpec::validate() const {
  const auto fail = [](const std::string& what) { throw InvalidArgument("corpus spec: " + what); };
  if (topics < 2) fail("topics must be >= 2");
  if (entities_per_topic < 1 || docs_per_topic < 1 || entities_per_doc < 1 ||
      vocabulary_size < 1 || sentences_per_doc < 1 || tokens_per_sentence < 1) {
    fail("all counts must be positive");
  }
  if (!(noise_rate >= 0.0 && noise_rate <= 1.0)) fail("noise_rate must lie in [0,1]");
  if (!(contamination >= 0.0 && contamination <= 1.0)) fail("contamination must lie in [0,1]");
}

SyntheticCorpusSpec SyntheticCorpusSpec::from_json(const json& j) {
  SyntheticCorpusSpec spec;
  try {
    spec.seed = j.value("seed", spec.seed);
    spec.topics = j.value("topics", spec.topics);
    spec.entities_per_topic = j.value("entities_per_topic", spec.entities_per_topic);
    spec.docs_per_topic = j.value("docs_per_topic", spec.docs_per_topic);
    spec.entities_per_doc = j.value("entities_per_doc", spec.entities_per_doc);
    spec.vocabulary_size = j.value("vocabulary_size", spec.vocabulary_size);
    spec.noise_rate = j.value("noise_rate", spec.noise_rate);
    spec.contamination = j.value("contamination", spec.contamination);
    spec.sentences_per_doc = j.value("sentences_per_doc", spec.sentences_per_doc);
    spec.tokens_per_sentence = j.value("tokens_per_sentence", spec.tokens_per_sentence);
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("corpus spec: ") + e.what());
  }
  spec.validate();
  return spec;
}

json SyntheticCorpusSpec::to_json() const {
  return json{{"seed", seed},
              {"topics", topics},
              {"entities_per_topic", entities_per_topic},
              {"docs_per_topic", docs_per_topic},
              {"entities_per_doc", entities_per_doc},
              {"vocabulary_size", vocabulary_size},
              {"noise_rate", noise_rate},
              {"contamination", contamination},
              {"sentences_per_doc", sentences_per_doc},
              {"tokens_per_sentence", tokens_per_sentence}};
}

std::set<std::string> SyntheticCorpus::relevant_docs(int topic) const {
  std::set<std::string> out;
  for (const auto& [id, t] : doc_topic) {
    if (t == topic) out.insert(id);
  }
  return out;
}

SyntheticCorpus generate_corpus(const SyntheticCorpusSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  SyntheticCorpus corpus;

  const auto topics = static_cast<std::size_t>(spec.topics);
  const auto per_topic = static_cast<std::size_t>(spec.entities_per_topic);
  corpus.topic_entities.resize(topics);
  std::vector<std::vector<std::string>> names(topics);
  for (std::size_t t = 0; t < topics; ++t) {
    for (std::size_t e = 0; e < per_topic; ++e) {
      const EntityType type = e == 0 ? EntityType::disease : kEntityCycle[(e - 1) % 6];
      LexiconEntry entry;
      entry.entity_id = std::string(to_string(type)) + ":t" + std::to_string(t) + "e" +
                        std::to_string(e);
      entry.entity_type = type;
      entry.canonical_name = "Topic" + letters(t) + "Factor" + letters(e);
      entry.synonyms = {entry.canonical_name};
      entry.source = "synthetic";
      corpus.topic_entities[t].push_back(entry.entity_id);
      names[t].push_back(entry.canonical_name);
      corpus.lexicon.push_back(std::move(entry));
    }
  }

  const std::size_t doc_count = topics * static_cast<std::size_t>(spec.docs_per_topic);
  std::vector<std::size_t> slots(doc_count);
  for (std::size_t i = 0; i < doc_count; ++i) slots[i] = i;
  rng.shuffle(slots);

  const auto focus_size = std::min<std::size_t>(spec.entities_per_doc, per_topic);
  const auto width = std::to_string(doc_count).size();
  for (std::size_t i = 0; i < doc_count; ++i) {
    const std::size_t topic = slots[i] / static_cast<std::size_t>(spec.docs_per_topic);

    std::vector<std::size_t> focus(per_topic);
    for (std::size_t e = 0; e < per_topic; ++e) focus[e] = e;
    rng.shuffle(focus);
    focus.resize(focus_size);

    const auto word = [&]() -> std::string {
      if (rng.unit() < spec.noise_rate) {
        return noise_word(rng.index(static_cast<std::size_t>(spec.vocabulary_size)));
      }
      if (rng.unit() < spec.contamination) {
        std::size_t other = rng.index(topics - 1);
        if (other >= topic) ++other;
        return names[other][rng.index(per_topic)];
      }
      return names[topic][focus[rng.index(focus.size())]];
    };
    const auto sentence = [&]() {
      std::string text;
      for (int w = 0; w < spec.tokens_per_sentence; ++w) {
        if (w > 0) text.push_back(' ');
        text += w == 0 ? capitalized(word()) : word();
      }
      return text;
    };

    DocumentRecord doc;
    std::string number = std::to_string(i + 1);
    doc.doc_id = "pmid:" + std::string(width - number.size(), '0') + number;
    doc.kind = DocKind::publication;
    doc.title = sentence();
    for (int s = 0; s < spec.sentences_per_doc; ++s) {
      if (s > 0) doc.body.push_back(' ');
      doc.body += sentence() + ".";
    }
    corpus.doc_topic.emplace(doc.doc_id, static_cast<int>(topic));
    corpus.documents.push_back(std::move(doc));
  }
  return corpus;
}

double precision_at_k(std::span<const std::string> ranked, const std::set<std::string>& relevant,
                      int k) {
  if (k <= 0) throw InvalidArgument("k must be positive");
  const auto n = std::min<std::size_t>(ranked.size(), static_cast<std::size_t>(k));
  const auto hits = std::count_if(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(n),
                                  [&](const std::string& id) { return relevant.count(id) > 0; });
  return static_cast<double>(hits) / static_cast<double>(k);
}

double recall_at_k(std::span<const std::string> ranked, const std::set<std::string>& relevant,
                   int k) {
  if (k <= 0) throw InvalidArgument("k must be positive");
  if (relevant.empty()) return 0.0;
  const auto n = std::min<std::size_t>(ranked.size(), static_cast<std::size_t>(k));
  const auto hits = std::count_if(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(n),
                                  [&](const std::string& id) { return relevant.count(id) > 0; });
  return static_cast<double>(hits) / static_cast<double>(relevant.size());
}

MetricsTable simulate_session(const SyntheticCorpus& corpus, const KnowledgeGraph& graph,
                              int seed_topic, int iterations, int k,
                              const RankingConfig& config) {
  if (seed_topic < 0 || static_cast<std::size_t>(seed_topic) >= corpus.topic_entities.size()) {
    throw InvalidArgument("unknown topic " + std::to_string(seed_topic));
  }
  if (iterations < 1) throw InvalidArgument("iterations must be >= 1");
  if (k < 1) throw InvalidArgument("k must be >= 1");

  RankingConfig session_config = config;
  session_config.top_k = std::max<int>(config.top_k, static_cast<int>(graph.documents().size()));
  const TextIndex index = TextIndex::build(graph);
  KnowledgeMap map(session_config);
  map.add_landmark(graph, corpus.topic_entities[seed_topic].front());

  const auto relevant = corpus.relevant_docs(seed_topic);
  std::vector<std::string> starred;
  MetricsTable table;
  for (int iteration = 0; iteration < iterations; ++iteration) {
    const auto& snapshot = map.refresh(graph, index);
    std::vector<std::string> ranked = starred;
    for (const auto& item : snapshot.publications) ranked.push_back(item.item_id);
    table.push_back({iteration, precision_at_k(ranked, relevant, k),
                     recall_at_k(ranked, relevant, k), static_cast<int>(starred.size())});

    auto next = std::find_if(snapshot.publications.begin(), snapshot.publications.end(),
                             [&](const RankedItem& item) { return relevant.count(item.item_id); });
    if (next == snapshot.publications.end()) break;
    map.star_document(graph, next->item_id);
    starred.push_back(next->item_id);
  }
  return table;
}

MetricsTable simulate_session(const SyntheticCorpus& corpus, int seed_topic, int iterations,
                              int k, const RankingConfig& config) {
  const auto graph = build_graph(corpus.documents, corpus.lexicon, {});
  return simulate_session(corpus, graph, seed_topic, iterations, k, config);
}

std::vector<SimulationRun> simulate_runs(const SyntheticCorpusSpec& spec, int runs,
                                         int iterations, int k, const RankingConfig& config) {
  if (runs < 1) throw InvalidArgument("runs must be >= 1");
  spec.validate();
  config.validate();
  std::vector<std::future<SimulationRun>> pending;
  for (int r = 0; r < runs; ++r) {
    SyntheticCorpusSpec run_spec = spec;
    run_spec.seed = spec.seed + static_cast<std::uint64_t>(r);
    pending.push_back(std::async(std::launch::async, [run_spec, iterations, k, config] {
      const auto corpus = generate_corpus(run_spec);
      return SimulationRun{run_spec.seed, simulate_session(corpus, 0, iterations, k, config)};
    }));
  }
  std::vector<SimulationRun> out;
  out.reserve(pending.size());
  for (auto& f : pending) out.push_back(f.get());
  return out;
}

void write_metrics_csv(std::ostream& out, std::span<const SimulationRun> runs) {
  out << "run,iteration,precision_at_k,recall_at_k,starred\n";
  out << std::fixed << std::setprecision(6);
  for (const auto& run : runs) {
    for (const auto& row : run.table) {
      out << run.seed << ',' << row.iteration << ',' << row.precision_at_k << ','
          << row.recall_at_k << ',' << row.starred << '\n';
    }
  }
}

double mean_precision_at(std::span<const SimulationRun> runs, int iteration) {
  double sum = 0.0;
  int count = 0;
  for (const auto& run : runs) {
    for (const auto& row : run.table) {
      if (row.iteration == iteration) {
        sum += row.precision_at_k;
        ++count;
      }
    }
  }
  if (count == 0) throw InvalidArgument("no run reached iteration " + std::to_string(iteration));
  return sum / count;
}

}  // namespace kmap
