#include <doctest.h>

#include <random>

#include "generators.hpp"
#include "kmap/error.hpp"
#include "kmap/session.hpp"
#include "support.hpp"

using namespace kmap;

namespace {

const TextIndex& fixture_index() {
  static const TextIndex index = TextIndex::build(test::fixture_graph());
  return index;
}

bool lists_exclude_members(const KnowledgeMap& m, const std::vector<RankedItem>& items) {
  for (const auto& it : items) {
    if (m.contains(it.item_id)) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("map creation") {
  KnowledgeMap a;
  KnowledgeMap b;
  CHECK(a.landmarks().empty());
  CHECK(a.dirty());
  CHECK_FALSE(a.snapshot());
  CHECK(a.id() != b.id());
  RankingConfig c;
  c.lambda = 0.3;
  CHECK(KnowledgeMap(c).config().lambda == 0.3);
  CHECK(KnowledgeMap(c).to_json()["config"]["lambda"] == 0.3);
  c.lambda = -1;
  CHECK_THROWS_AS(KnowledgeMap{c}, InvalidArgument);
}

TEST_CASE("map mutations") {
  const auto& g = test::fixture_graph();
  KnowledgeMap m;
  CHECK(m.add_landmark(g, "disease:covid-19"));
  CHECK(m.add_landmark(g, "disease:alzheimers"));
  CHECK(m.add_landmark(g, "disease:dementia"));
  CHECK(m.landmarks() == std::vector<std::string>{"disease:covid-19", "disease:alzheimers", "disease:dementia"});
  CHECK(m.dirty());

  m.refresh(g, fixture_index());
  CHECK_FALSE(m.dirty());

  SUBCASE("duplicate landmark is a no-op") {
    const auto fp = m.fingerprint();
    CHECK_FALSE(m.add_landmark(g, "disease:covid-19"));
    CHECK_FALSE(m.dirty());
    CHECK(m.fingerprint() == fp);
  }
  SUBCASE("removing an absent landmark is a no-op") {
    CHECK_FALSE(m.remove_landmark(g, "gene:il6"));
    CHECK_FALSE(m.dirty());
  }
  SUBCASE("star then unstar leaves the map dirty") {
    CHECK(m.star_document(g, "pmid:33559975"));
    CHECK(m.unstar_document(g, "pmid:33559975"));
    CHECK(m.starred_docs().empty());
    CHECK(m.dirty());
    CHECK(m.revision() == 5);
  }
  SUBCASE("starring an entity adds a landmark") {
    CHECK(m.star_document(g, "gene:il6"));
    CHECK(m.landmarks().back() == "gene:il6");
    CHECK(m.starred_docs().empty());
  }
  SUBCASE("unknown ids") {
    CHECK_THROWS_AS(m.add_landmark(g, "gene:nope"), UnknownIdError);
    CHECK_THROWS_AS(m.add_landmark(g, "pmid:33559975"), UnknownIdError);
    CHECK_THROWS_AS(m.star_document(g, "pmid:0"), UnknownIdError);
    CHECK_FALSE(m.dirty());
  }
}

TEST_CASE("refresh") {
  const auto& g = test::fixture_graph();
  SUBCASE("empty map lists items by id with zero scores") {
    KnowledgeMap m;
    RankingConfig c;
    const auto& s = m.refresh(g, fixture_index());
    CHECK(s.computed_at == 1);
    REQUIRE(s.publications.size() == static_cast<std::size_t>(c.top_k));
    for (std::size_t i = 0; i < s.publications.size(); ++i) {
      CHECK(s.publications[i].score == 0.0);
      if (i) CHECK(s.publications[i - 1].item_id < s.publications[i].item_id);
    }
    CHECK(s.clinical_trials.size() == 8);
  }
  SUBCASE("refreshing twice only advances the sequence number") {
    KnowledgeMap m;
    m.add_landmark(g, "disease:dementia");
    auto first = m.refresh(g, fixture_index());
    auto second = m.refresh(g, fixture_index());
    CHECK(second.computed_at == first.computed_at + 1);
    second.computed_at = first.computed_at;
    CHECK(second == first);
  }
  SUBCASE("map members never appear in results") {
    KnowledgeMap m;
    m.add_landmark(g, "disease:covid-19");
    m.star_document(g, "pmid:33559975");
    m.star_document(g, "nct:NCT90000002");
    const auto& s = m.refresh(g, fixture_index());
    CHECK(lists_exclude_members(m, s.publications));
    CHECK(lists_exclude_members(m, s.clinical_trials));
  }
  SUBCASE("three-disease map surfaces publications mentioning several of them") {
    KnowledgeMap m;
    for (auto id : {"disease:covid-19", "disease:alzheimers", "disease:dementia"}) m.add_landmark(g, id);
    const auto& s = m.refresh(g, fixture_index());
    for (int i = 0; i < 3; ++i) {
      const auto& mentioned = g.entities_in(s.publications[i].item_id);
      int hits = 0;
      for (auto id : {"disease:covid-19", "disease:alzheimers", "disease:dementia"}) hits += mentioned.count(id) > 0;
      CHECK(hits >= 2);
    }
  }
}

TEST_CASE("staleness follows the fingerprint under random interleavings") {
  const auto& g = test::fixture_graph();
  std::vector<std::string> entities;
  std::vector<std::string> docs;
  for (const auto& [id, _] : g.entities()) entities.push_back(id);
  for (const auto& [id, _] : g.documents()) docs.push_back(id);
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 30; ++trial) {
    KnowledgeMap m;
    bool expect_dirty = true;
    for (int step = 0; step < 40; ++step) {
      const auto op = gen::pick(rng, 6);
      bool changed = false;
      switch (op) {
        case 0: changed = m.add_landmark(g, entities[gen::pick(rng, entities.size())]); break;
        case 1: changed = m.remove_landmark(g, entities[gen::pick(rng, entities.size())]); break;
        case 2: changed = m.star_document(g, docs[gen::pick(rng, docs.size())]); break;
        case 3: changed = m.unstar_document(g, docs[gen::pick(rng, docs.size())]); break;
        case 4:
          m.refresh(g, fixture_index());
          expect_dirty = false;
          break;
        default: {
          const auto before = m.snapshot();
          m.build_card(g, fixture_index(), entities[gen::pick(rng, entities.size())]);
          CHECK(m.snapshot() == before);
        }
      }
      if (changed) expect_dirty = true;
      CHECK(m.dirty() == expect_dirty);
      CHECK(m.dirty() == (!m.snapshot() || m.snapshot()->fingerprint != m.fingerprint()));
    }
  }
}

TEST_CASE("session replay yields identical snapshots") {
  const auto& g = test::fixture_graph();
  auto play = [&] {
    KnowledgeMap m;
    m.add_landmark(g, "disease:covid-19");
    m.refresh(g, fixture_index());
    m.star_document(g, "pmid:90000003");
    m.add_landmark(g, "gene:il6");
    m.remove_landmark(g, "disease:covid-19");
    return m.refresh(g, fixture_index());
  };
  CHECK(play() == play());
}

TEST_CASE("cards") {
  const auto& g = test::fixture_graph();
  KnowledgeMap m;
  for (auto id : {"disease:covid-19", "disease:alzheimers", "disease:dementia"}) m.add_landmark(g, id);
  m.refresh(g, fixture_index());

  SUBCASE("sections depend on the entity type") {
    auto names = [&](const Card& c) {
      std::vector<std::string> out;
      for (const auto& s : c.sections) out.push_back(s.name);
      return out;
    };
    CHECK(names(m.build_card(g, fixture_index(), "disease:covid-19")) ==
          std::vector<std::string>{"related publications", "related clinical trials", "associated genes", "associated drugs"});
    CHECK(names(m.build_card(g, fixture_index(), "gene:il6")) ==
          std::vector<std::string>{"related publications", "related clinical trials", "related variants",
                                   "related pathways and processes"});
    CHECK(names(m.build_card(g, fixture_index(), "drug:tocilizumab")).size() == 2);
  }
  SUBCASE("first related publication on the COVID-19 card concerns COVID-19 and dementia") {
    const auto card = m.build_card(g, fixture_index(), "disease:covid-19");
    const auto& pubs = card.sections[0].items;
    REQUIRE_FALSE(pubs.empty());
    const auto& mentioned = g.entities_in(pubs[0].item_id);
    CHECK(mentioned.count("disease:covid-19"));
    CHECK(mentioned.count("disease:dementia"));
  }
  SUBCASE("sections are sorted and exclude the card entity and map members") {
    m.star_document(g, "pmid:33559975");
    m.add_landmark(g, "gene:crp");
    for (const auto& id : {"disease:covid-19", "gene:il6", "disease:dementia"}) {
      const auto card = m.build_card(g, fixture_index(), id);
      CHECK(card.canonical_name == g.find_entity(id)->canonical_name);
      for (const auto& s : card.sections) {
        for (std::size_t i = 0; i < s.items.size(); ++i) {
          CHECK(s.items[i].item_id != id);
          CHECK_FALSE(m.contains(s.items[i].item_id));
          CHECK(s.items[i].rank == static_cast<int>(i) + 1);
          if (i) CHECK(s.items[i - 1].score >= s.items[i].score);
        }
      }
    }
  }
  SUBCASE("card generation leaves the map untouched") {
    const auto fp = m.fingerprint();
    const auto snap = m.snapshot();
    m.build_card(g, fixture_index(), "gene:il6");
    CHECK(m.fingerprint() == fp);
    CHECK(m.snapshot() == snap);
    CHECK_FALSE(m.dirty());
  }
  SUBCASE("unknown card entity") {
    CHECK_THROWS_AS(m.build_card(g, fixture_index(), "gene:nope"), UnknownIdError);
    CHECK_THROWS_AS(m.build_card(g, fixture_index(), "pmid:33559975"), UnknownIdError);
  }
}

TEST_CASE("card for an isolated entity on an empty map") {
  LexiconEntry e;
  e.entity_id = "disease:lonely";
  e.entity_type = EntityType::disease;
  e.canonical_name = "Lonely";
  e.synonyms = {"Lonely"};
  DocumentRecord d;
  d.doc_id = "pmid:1";
  d.title = "unrelated";
  const auto g = KnowledgeGraph::assemble({e}, {d}, {}, {});
  const auto index = TextIndex::build(g);
  KnowledgeMap m;
  const auto card = m.build_card(g, index, "disease:lonely");
  CHECK(card.sections.size() == 4);
  for (const auto& s : card.sections) CHECK(s.items.empty());
}

TEST_CASE("map JSON round trip") {
  const auto& g = test::fixture_graph();
  RankingConfig c;
  c.top_k = 7;
  KnowledgeMap m(c);
  m.add_landmark(g, "disease:covid-19");
  m.star_document(g, "pmid:33559975");
  const auto back = KnowledgeMap::from_json(m.to_json());
  CHECK(back.id() == m.id());
  CHECK(back.landmarks() == m.landmarks());
  CHECK(back.starred_docs() == m.starred_docs());
  CHECK(back.config().top_k == 7);
  CHECK(back.dirty());
  CHECK_THROWS_AS(KnowledgeMap::from_json(json::array()), InvalidArgument);
  CHECK_THROWS_AS(KnowledgeMap::from_json(json{{"landmarks", 3}}), InvalidArgument);
  CHECK_THROWS_AS(ranking_config_from_json(json{{"damping", 1.5}}), InvalidArgument);
  CHECK_THROWS_AS(ranking_config_from_json(json{{"top_k", "many"}}), InvalidArgument);
}
