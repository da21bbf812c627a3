#include <doctest.h>

#include <random>
#include <sstream>

#include "generators.hpp"
#include "kmap/error.hpp"
#include "kmap/ingest.hpp"
#include "kmap/simulate.hpp"
#include "oracle.hpp"

using namespace kmap;

TEST_CASE("synthetic corpus generation") {
  SyntheticCorpusSpec spec;
  spec.topics = 2;
  spec.docs_per_topic = 10;
  const auto corpus = generate_corpus(spec);
  CHECK(corpus.documents.size() == 20);
  CHECK(corpus.relevant_docs(0).size() == 10);
  CHECK(corpus.lexicon.size() == 2u * spec.entities_per_topic);

  SUBCASE("same spec, same corpus") {
    const auto again = generate_corpus(spec);
    CHECK(again.documents == corpus.documents);
    CHECK(again.lexicon == corpus.lexicon);
    CHECK(again.doc_topic == corpus.doc_topic);
  }
  SUBCASE("another seed differs") {
    auto other = spec;
    other.seed = 2;
    CHECK(generate_corpus(other).documents != corpus.documents);
  }
  SUBCASE("no contamination keeps documents on topic") {
    auto clean = spec;
    clean.contamination = 0.0;
    const auto c = generate_corpus(clean);
    const auto g = build_graph(c.documents, c.lexicon, {});
    for (const auto& [doc, topic] : c.doc_topic) {
      for (const auto& [entity, _] : g.entities_in(doc)) {
        const auto& own = c.topic_entities[topic];
        CHECK(std::find(own.begin(), own.end(), entity) != own.end());
      }
    }
  }
  SUBCASE("every synthetic entity is found by the extractor") {
    const auto g = build_graph(corpus.documents, corpus.lexicon, {});
    CHECK(g.mentions().size() > 0);
    for (const auto& m : g.mentions()) CHECK(g.find_entity(m.entity_id)->canonical_name == m.surface);
  }
  SUBCASE("invalid specs") {
    auto bad = spec;
    bad.topics = 1;
    CHECK_THROWS_AS(generate_corpus(bad), InvalidArgument);
    bad = spec;
    bad.noise_rate = 2;
    CHECK_THROWS_AS(generate_corpus(bad), InvalidArgument);
    CHECK_THROWS_AS(SyntheticCorpusSpec::from_json(json{{"topics", "four"}}), InvalidArgument);
  }
  SUBCASE("json round trip") {
    auto s = spec;
    s.seed = 99;
    s.noise_rate = 0.25;
    const auto back = SyntheticCorpusSpec::from_json(s.to_json());
    CHECK(back.to_json() == s.to_json());
  }
}

TEST_CASE("metrics match a naive implementation") {
  std::mt19937_64 rng(51);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::string> ranked;
    std::set<std::string> relevant;
    const auto n = gen::pick(rng, 15);
    for (std::size_t i = 0; i < n; ++i) ranked.push_back("d" + std::to_string(gen::pick(rng, 30)));
    for (int i = 0; i < 30; ++i) {
      if (gen::coin(rng, 0.3)) relevant.insert("d" + std::to_string(i));
    }
    const int k = 1 + static_cast<int>(gen::pick(rng, 12));
    CHECK(precision_at_k(ranked, relevant, k) == oracle::precision(ranked, relevant, k));
    CHECK(recall_at_k(ranked, relevant, k) == oracle::recall(ranked, relevant, k));
  }
  CHECK_THROWS_AS(precision_at_k({}, {}, 0), InvalidArgument);
}

TEST_CASE("simulate_session") {
  SyntheticCorpusSpec spec;
  spec.topics = 3;
  spec.docs_per_topic = 5;
  const auto corpus = generate_corpus(spec);

  SUBCASE("baseline row exists for a single iteration") {
    const auto t = simulate_session(corpus, 0, 1, 10);
    REQUIRE(t.size() == 1);
    CHECK(t[0].iteration == 0);
    CHECK(t[0].starred == 0);
  }
  SUBCASE("stops once every relevant document is starred") {
    const auto t = simulate_session(corpus, 0, 50, 10);
    CHECK(t.size() == 6);
    CHECK(t.back().starred == 5);
    CHECK(t.back().recall_at_k == 1.0);
    for (std::size_t i = 0; i < t.size(); ++i) {
      CHECK(t[i].iteration == static_cast<int>(i));
      CHECK(t[i].precision_at_k >= 0.0);
      CHECK(t[i].precision_at_k <= 1.0);
      CHECK(t[i].starred == static_cast<int>(i));
    }
  }
  SUBCASE("deterministic") { CHECK(simulate_session(corpus, 1, 4, 5) == simulate_session(corpus, 1, 4, 5)); }
  SUBCASE("bad arguments") {
    CHECK_THROWS_AS(simulate_session(corpus, 3, 2, 10), InvalidArgument);
    CHECK_THROWS_AS(simulate_session(corpus, -1, 2, 10), InvalidArgument);
    CHECK_THROWS_AS(simulate_session(corpus, 0, 0, 10), InvalidArgument);
  }
}

TEST_CASE("simulate_runs and CSV output") {
  SyntheticCorpusSpec spec;
  spec.docs_per_topic = 4;
  const auto runs = simulate_runs(spec, 3, 3, 5);
  REQUIRE(runs.size() == 3);
  CHECK(runs[2].seed == 3);
  CHECK(simulate_runs(spec, 3, 3, 5)[1].table == runs[1].table);
  std::ostringstream out;
  write_metrics_csv(out, runs);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "run,iteration,precision_at_k,recall_at_k,starred");
  std::getline(in, line);
  CHECK(line.rfind("1,0,", 0) == 0);
  double manual = 0.0;
  for (const auto& r : runs) manual += r.table[0].precision_at_k;
  CHECK(mean_precision_at(runs, 0) == doctest::Approx(manual / 3));
  CHECK_THROWS_AS(mean_precision_at(runs, 99), InvalidArgument);
}
