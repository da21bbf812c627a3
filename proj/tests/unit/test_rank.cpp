#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "generators.hpp"
#include "kmap/error.hpp"
#include "kmap/rank.hpp"
#include "oracle.hpp"
#include "support.hpp"

using namespace kmap;

namespace {

DocumentRecord doc(std::string id, std::string title, std::string body = "") {
  DocumentRecord d;
  d.doc_id = std::move(id);
  d.title = std::move(title);
  d.body = std::move(body);
  return d;
}

KnowledgeGraph two_doc_graph() {
  return KnowledgeGraph::assemble({}, {doc("d1", "covid dementia"), doc("d2", "covid")}, {}, {});
}

double value_of(const TextIndex& index, const SparseVector& v, std::string_view term) {
  const auto id = index.term_id(term);
  if (!id) return 0.0;
  for (const auto& e : v) {
    if (e.term == *id) return e.value;
  }
  return 0.0;
}

SparseVector vec(std::vector<std::pair<std::uint32_t, double>> entries) {
  SparseVector v;
  for (auto [t, x] : entries) v.push_back({t, x});
  return v;
}

SparseVector random_vector(std::mt19937_64& rng, std::uint32_t dims) {
  SparseVector v;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::uint32_t t = 0; t < dims; ++t) {
    if (gen::coin(rng, 0.4)) v.push_back({t, u(rng)});
  }
  return v;
}

RankingConfig tight() {
  RankingConfig c;
  c.max_iter = 100000;
  c.epsilon = 1e-13;
  return c;
}

}  // namespace

TEST_CASE("idf on a two-item corpus") {
  const auto index = TextIndex::build(two_doc_graph());
  CHECK(index.item_count() == 2);
  CHECK(*index.idf("covid") == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(*index.idf("dementia") == doctest::Approx(std::log(1.5) + 1.0).epsilon(1e-12));
  CHECK(*index.idf("dementia") == doctest::Approx(1.4055).epsilon(1e-4));
  CHECK_FALSE(index.idf("zzzz"));
}

TEST_CASE("text index vectors") {
  SUBCASE("title-only document") {
    const auto index = TextIndex::build(two_doc_graph());
    CHECK(l2_norm(index.vector_for("d2")) == doctest::Approx(1.0));
    CHECK(index.vector_for("nope").empty());
  }
  SUBCASE("entity pseudo-document without summary") {
    LexiconEntry e;
    e.entity_id = "gene:il6";
    e.canonical_name = "IL-6";
    e.synonyms = {"IL6", "IL-6"};
    const auto g = KnowledgeGraph::assemble({e}, {doc("d1", "other words")}, {}, {});
    const auto index = TextIndex::build(g);
    const auto& v = index.vector_for("gene:il6");
    REQUIRE(v.size() == 1);
    CHECK(value_of(index, v, "il6") == doctest::Approx(1.0));
  }
  SUBCASE("fixture vectors are unit, non-negative and match a naive index") {
    const auto& g = test::fixture_graph();
    const auto index = TextIndex::build(g);
    std::vector<DocumentRecord> docs;
    std::vector<LexiconEntry> lex;
    for (const auto& [_, d] : g.documents()) docs.push_back(d);
    for (const auto& [_, e] : g.entities()) lex.push_back(e);
    const auto naive = oracle::build_index(docs, lex);
    CHECK(index.item_count() == 44);
    CHECK(index.vocabulary_size() == naive.idf.size());
    for (const auto& [id, nv] : naive.vectors) {
      const auto& v = index.vector_for(id);
      CHECK(l2_norm(v) == doctest::Approx(1.0).epsilon(1e-9));
      CHECK(v.size() == nv.size());
      for (const auto& [term, x] : nv) CHECK(value_of(index, v, term) == doctest::Approx(x).epsilon(1e-12));
      for (const auto& e : v) CHECK(e.value >= 0.0);
    }
  }
}

TEST_CASE("rocchio examples") {
  RankingConfig c;
  const auto q = vec({{0, 3.0}, {2, 4.0}});
  SUBCASE("feedback disabled") {
    c.alpha = 1;
    c.beta = 0;
    const auto p = vec({{1, 1.0}});
    CHECK(rocchio_centroid(q, std::vector<SparseVector>{p}, c) == normalized(q));
  }
  SUBCASE("pure feedback") {
    const auto p = vec({{1, 0.6}, {3, 0.8}});
    const auto r = rocchio_centroid({}, std::vector<SparseVector>{p}, c);
    REQUIRE(r.size() == 2);
    CHECK(r[0].value == doctest::Approx(0.6));
    CHECK(r[1].value == doctest::Approx(0.8));
  }
  SUBCASE("q0=(1,0), P={(0,1)}") {
    c.alpha = 1;
    c.beta = 1;
    const auto r = rocchio_centroid(vec({{0, 1.0}}), std::vector<SparseVector>{vec({{1, 1.0}})}, c);
    REQUIRE(r.size() == 2);
    CHECK(r[0].value == doctest::Approx(0.7071).epsilon(1e-4));
    CHECK(r[1].value == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
  }
  SUBCASE("empty everything") { CHECK(rocchio_centroid({}, {}, c).empty()); }
}

TEST_CASE("rocchio single-positive monotonicity on random vectors") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.01, 3.0);
  for (int trial = 0; trial < 300; ++trial) {
    auto q = random_vector(rng, 12);
    auto d = normalized(random_vector(rng, 12));
    if (q.empty() || d.empty()) continue;
    RankingConfig c;
    c.alpha = u(rng);
    c.beta = u(rng);
    const auto centroid = rocchio_centroid(q, std::vector<SparseVector>{d}, c);
    CHECK(dot(d, centroid) >= dot(d, normalized(q)) - 1e-12);
  }
}

TEST_CASE("pagerank examples") {
  SUBCASE("single isolated node") {
    Adjacency adj(1, {});
    auto r = personalized_pagerank(adj, std::vector<double>{1.0}, RankingConfig{});
    CHECK(r.scores[0] == doctest::Approx(1.0));
  }
  const std::vector<WeightedEdge> path{{0, 1, 1.0}, {1, 2, 1.0}};
  const Adjacency adj(3, path);
  SUBCASE("path from one end") {
    // the middle node collects all of node 0's walk mass, so only 1 > 2 is guaranteed
    auto r = personalized_pagerank(adj, std::vector<double>{1, 0, 0}, tight());
    CHECK(r.scores[1] > r.scores[2]);
    CHECK(r.scores[0] > r.scores[2]);
    auto o = oracle::pagerank(gen::dense(3, path), {1, 0, 0}, 0.85, 1e-14);
    for (int i = 0; i < 3; ++i) CHECK(r.scores[i] == doctest::Approx(o[i]).epsilon(1e-10));
  }
  SUBCASE("symmetric restart") {
    auto r = personalized_pagerank(adj, std::vector<double>{1, 0, 1}, tight());
    CHECK(r.scores[0] == doctest::Approx(r.scores[2]).epsilon(1e-14));
  }
  SUBCASE("invalid restart vectors") {
    CHECK_THROWS_AS(personalized_pagerank(adj, std::vector<double>{0, 0, 0}, RankingConfig{}), InvalidArgument);
    CHECK_THROWS_AS(personalized_pagerank(adj, std::vector<double>{1, 0}, RankingConfig{}), InvalidArgument);
    CHECK_THROWS_AS(personalized_pagerank(adj, std::vector<double>{1, -1, 1}, RankingConfig{}), InvalidArgument);
  }
  SUBCASE("graph overload") {
    const auto& g = test::fixture_graph();
    CHECK_THROWS_AS(personalized_pagerank(g, {}, RankingConfig{}), InvalidArgument);
    CHECK_THROWS_AS(personalized_pagerank(g, {"gene:nope"}, RankingConfig{}), UnknownIdError);
    auto r = personalized_pagerank(g, {"gene:il6"}, RankingConfig{});
    CHECK(r.size() == g.node_count());
  }
}

TEST_CASE("pagerank properties on random graphs") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 1 + gen::pick(rng, 40);
    const auto edges = gen::random_edges(rng, n);
    std::vector<double> restart(n, 0.0);
    restart[gen::pick(rng, n)] = 1.0;
    if (gen::coin(rng, 0.5)) restart[gen::pick(rng, n)] = 1.0;
    const Adjacency adj(n, edges);
    const auto r = personalized_pagerank(adj, restart, tight()).scores;

    CHECK(std::accumulate(r.begin(), r.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));
    for (double x : r) CHECK(x >= 0.0);

    // reachability from the restart set
    std::vector<bool> seen(n, false);
    std::vector<std::size_t> stack;
    for (std::size_t i = 0; i < n; ++i) {
      if (restart[i] > 0) {
        seen[i] = true;
        stack.push_back(i);
      }
    }
    while (!stack.empty()) {
      const auto u = stack.back();
      stack.pop_back();
      for (const auto& a : adj.arcs(u)) {
        if (!seen[a.target]) {
          seen[a.target] = true;
          stack.push_back(a.target);
        }
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (!seen[i]) CHECK(r[i] == 0.0);
    }

    // scaling every weight leaves the result unchanged
    auto scaled = edges;
    for (auto& e : scaled) e.weight *= 7.5;
    const auto s = personalized_pagerank(Adjacency(n, scaled), restart, tight()).scores;
    for (std::size_t i = 0; i < n; ++i) CHECK(s[i] == doctest::Approx(r[i]).epsilon(1e-9));
  }
}

TEST_CASE("adjacency merges parallel edges") {
  const std::vector<WeightedEdge> edges{{0, 1, 1.0, EdgeOrigin::mention}, {0, 1, 0.5, EdgeOrigin::relation}};
  Adjacency adj(3, edges);
  REQUIRE(adj.arcs(0).size() == 1);
  CHECK(adj.arcs(0)[0].weight == doctest::Approx(1.5));
  CHECK(adj.strength(1) == doctest::Approx(1.5));
  CHECK(adj.strength(2) == 0.0);
}

TEST_CASE("min-max normalization") {
  CHECK(min_max_normalize(std::vector<double>{}).empty());
  CHECK(min_max_normalize(std::vector<double>{2, 2}) == std::vector<double>{0, 0});
  CHECK(min_max_normalize(std::vector<double>{1, 3, 2}) == std::vector<double>{0, 1, 0.5});
}

TEST_CASE("rank_items") {
  SUBCASE("empty map, query dementia") {
    const auto g = two_doc_graph();
    const auto index = TextIndex::build(g);
    auto items = rank_items(g, index, {}, "dementia", std::nullopt, RankingConfig{});
    REQUIRE(items.size() == 2);
    CHECK(items[0].item_id == "d1");
    CHECK(items[1].text_sim == 0.0);
    CHECK(items[0].rank == 1);
    CHECK(items[1].rank == 2);
  }
  const auto& g = test::fixture_graph();
  const auto index = TextIndex::build(g);
  SUBCASE("lambda has no effect on an empty map") {
    RankingConfig a;
    a.lambda = 1.0;
    RankingConfig b;
    CHECK(rank_items(g, index, {}, "dementia covid", std::nullopt, a) ==
          rank_items(g, index, {}, "dementia covid", std::nullopt, b));
  }
  SUBCASE("invariants on a populated map") {
    MapContext map{{"disease:covid-19", "gene:il6"}, {"pmid:33559975"}};
    RankingConfig c;
    c.top_k = 1000;
    const auto items = rank_items(g, index, map, "risk", std::nullopt, c);
    CHECK(items.size() == g.node_count() - 3);
    for (std::size_t i = 0; i < items.size(); ++i) {
      CHECK(items[i].rank == static_cast<int>(i) + 1);
      CHECK(items[i].score >= 0.0);
      CHECK(items[i].score <= 1.0);
      CHECK(items[i].item_id != "gene:il6");
      CHECK(items[i].item_id != "pmid:33559975");
      CHECK(items[i].score == doctest::Approx(0.5 * items[i].text_sim + 0.5 * items[i].graph_prox));
      if (i) {
        CHECK(items[i - 1].score >= items[i].score);
        if (items[i - 1].score == items[i].score) CHECK(items[i - 1].item_id < items[i].item_id);
      }
    }
    CHECK(rank_items(g, index, map, "risk", std::nullopt, c) == items);
  }
  SUBCASE("kind filter and truncation") {
    RankingConfig c;
    c.top_k = 3;
    auto items = rank_items(g, index, {}, "trial", ItemKind::clinical_trial, c);
    CHECK(items.size() == 3);
    for (const auto& it : items) CHECK(it.kind == ItemKind::clinical_trial);
  }
  SUBCASE("unknown members") {
    MapContext map{{"gene:nope"}, {}};
    CHECK_THROWS_AS(rank_items(g, index, map, "", std::nullopt, RankingConfig{}), UnknownIdError);
  }
  SUBCASE("invalid config") {
    RankingConfig c;
    c.lambda = 2;
    CHECK_THROWS_AS(rank_items(g, index, {}, "", std::nullopt, c), InvalidArgument);
  }
}
