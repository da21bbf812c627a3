#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <memory>

#include "kmap/error.hpp"
#include "kmap/graph.hpp"
#include "kmap/ingest.hpp"
#include "kmap/rank.hpp"
#include "kmap/serialize.hpp"
#include "kmap/service.hpp"
#include "kmap/session.hpp"
#include "kmap/simulate.hpp"

namespace py = pybind11;
using namespace kmap;

namespace {

// JSON crosses the boundary as text; Python's json module does the rest.
py::object to_py(const json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

json from_py(const py::object& o) {
  return json::parse(py::module_::import("json").attr("dumps")(o).cast<std::string>());
}

// A graph together with its text index, shared by maps and services.
struct Corpus {
  KnowledgeGraph graph;
  TextIndex index;

  explicit Corpus(KnowledgeGraph g) : graph(std::move(g)), index(TextIndex::build(graph)) {}
};

using CorpusPtr = std::shared_ptr<Corpus>;

std::optional<ItemKind> kind_arg(const std::optional<std::string>& text) {
  if (!text) return std::nullopt;
  auto kind = parse_item_kind(*text);
  if (!kind) throw InvalidArgument("unknown item kind '" + *text + "'");
  return kind;
}

py::list items(const KnowledgeGraph& graph, const std::vector<RankedItem>& ranked) {
  py::list out;
  for (const auto& item : ranked) out.append(to_py(item_json(graph, item)));
  return out;
}

}  // namespace

PYBIND11_MODULE(_kmap, m) {
  m.doc() = "Knowledge-map engine: ingest, ranking and interactive map sessions";

  auto base = py::register_exception<Error>(m, "KmapError", PyExc_RuntimeError);
  py::register_exception<IoError>(m, "IoError", base);
  py::register_exception<ParseError>(m, "ParseError", base);
  py::register_exception<IntegrityError>(m, "IntegrityError", base);
  py::register_exception<UnknownIdError>(m, "UnknownIdError", base);
  py::register_exception<InvalidArgument>(m, "InvalidArgument", base);

  py::class_<Corpus, CorpusPtr>(m, "Graph")
      .def_static(
          "load", [](const std::filesystem::path& dir) { return std::make_shared<Corpus>(load_graph(dir)); },
          py::arg("graph_dir"))
      .def("save", [](const Corpus& c, const std::filesystem::path& dir) { save_graph(c.graph, dir); },
           py::arg("graph_dir"))
      .def_property_readonly("node_count", [](const Corpus& c) { return c.graph.node_count(); })
      .def_property_readonly("entity_count", [](const Corpus& c) { return c.graph.entities().size(); })
      .def_property_readonly("document_count", [](const Corpus& c) { return c.graph.documents().size(); })
      .def_property_readonly("mention_count", [](const Corpus& c) { return c.graph.mentions().size(); })
      .def_property_readonly("relation_count", [](const Corpus& c) { return c.graph.relations().size(); })
      .def("entity",
           [](const Corpus& c, const std::string& id) -> py::object {
             const auto* e = c.graph.find_entity(id);
             return e ? to_py(json(*e)) : py::none();
           })
      .def("document",
           [](const Corpus& c, const std::string& id) -> py::object {
             const auto* d = c.graph.find_document(id);
             return d ? to_py(json(*d)) : py::none();
           })
      .def("rank",
           [](const Corpus& c, const std::string& query, const std::optional<std::string>& kind,
              const py::object& config) {
             const auto cfg = config.is_none() ? RankingConfig{} : ranking_config_from_json(from_py(config));
             return items(c.graph, rank_items(c.graph, c.index, MapContext{}, query, kind_arg(kind), cfg));
           },
           py::arg("query"), py::arg("kind") = py::none(), py::arg("config") = py::none());

  m.def(
      "ingest",
      [](const std::filesystem::path& docs, const std::filesystem::path& lexicon,
         const std::optional<std::filesystem::path>& relations, const std::filesystem::path& out_dir) {
        return std::make_shared<Corpus>(ingest_corpus(docs, lexicon, relations, out_dir));
      },
      py::arg("documents"), py::arg("lexicon"), py::arg("relations") = py::none(), py::arg("out_dir"));

  py::class_<KnowledgeMap>(m, "KnowledgeMap")
      .def(py::init([](const py::object& config) {
             return KnowledgeMap(config.is_none() ? RankingConfig{} : ranking_config_from_json(from_py(config)));
           }),
           py::arg("config") = py::none())
      .def_property_readonly("id", &KnowledgeMap::id)
      .def_property_readonly("landmarks", &KnowledgeMap::landmarks)
      .def_property_readonly("starred_docs", &KnowledgeMap::starred_docs)
      .def_property_readonly("dirty", &KnowledgeMap::dirty)
      .def_property_readonly("fingerprint", &KnowledgeMap::fingerprint)
      .def_property_readonly("revision", &KnowledgeMap::revision)
      .def("add_landmark", [](KnowledgeMap& km, const Corpus& c, const std::string& id) { return km.add_landmark(c.graph, id); })
      .def("remove_landmark", [](KnowledgeMap& km, const Corpus& c, const std::string& id) { return km.remove_landmark(c.graph, id); })
      .def("star", [](KnowledgeMap& km, const Corpus& c, const std::string& id) { return km.star_document(c.graph, id); })
      .def("unstar", [](KnowledgeMap& km, const Corpus& c, const std::string& id) { return km.unstar_document(c.graph, id); })
      .def("refresh", [](KnowledgeMap& km, const Corpus& c) { return to_py(to_json(km.refresh(c.graph, c.index))); })
      .def("snapshot",
           [](const KnowledgeMap& km) -> py::object {
             return km.snapshot() ? to_py(to_json(*km.snapshot())) : py::none();
           })
      .def("card",
           [](const KnowledgeMap& km, const Corpus& c, const std::string& id) {
             return to_py(to_json(km.build_card(c.graph, c.index, id)));
           })
      .def("to_dict", [](const KnowledgeMap& km) { return to_py(km.to_json()); })
      .def_static("from_dict", [](const py::object& o) { return KnowledgeMap::from_json(from_py(o)); });

  // In-process access to the HTTP API, without sockets.
  py::class_<Service>(m, "Service")
      .def(py::init([](const Corpus& c, const py::object& config) {
             return std::make_unique<Service>(c.graph, config.is_none() ? ServiceConfig{} : ServiceConfig::from_json(from_py(config)));
           }),
           py::arg("graph"), py::arg("config") = py::none())
      .def(
          "request",
          [](Service& s, const std::string& method, const std::string& path, const py::object& body,
             const std::map<std::string, std::string>& params) {
            const std::string text = body.is_none() ? "" : from_py(body).dump();
            const auto r = s.handle(ApiRequest{method, path, params, text});
            return py::make_tuple(r.status, r.body.is_null() ? py::none() : to_py(r.body));
          },
          py::arg("method"), py::arg("path"), py::arg("body") = py::none(),
          py::arg("params") = std::map<std::string, std::string>{});

  m.def(
      "simulate",
      [](const py::object& spec, int runs, int iterations, int k) {
        const auto s = spec.is_none() ? SyntheticCorpusSpec{} : SyntheticCorpusSpec::from_json(from_py(spec));
        std::vector<SimulationRun> result;
        {
          py::gil_scoped_release release;
          result = simulate_runs(s, runs, iterations, k, RankingConfig{});
        }
        py::list out;
        for (const auto& run : result) {
          for (const auto& row : run.table) {
            py::dict d;
            d["run"] = run.seed;
            d["iteration"] = row.iteration;
            d["precision_at_k"] = row.precision_at_k;
            d["recall_at_k"] = row.recall_at_k;
            d["starred"] = row.starred;
            out.append(d);
          }
        }
        return out;
      },
      py::arg("spec") = py::none(), py::arg("runs") = 20, py::arg("iterations") = 6, py::arg("k") = 10);
}
