#include <doctest.h>

#include "qdiffuse/errors.hpp"
#include "qdiffuse/graph.hpp"

using namespace qdiffuse;

namespace {

OrientedGraph four_node() {
  return OrientedGraph::from_edge_list({"A", "B", "C", "D"},
                                       {{"B", "A"}, {"A", "C"}, {"C", "B"}, {"D", "C"}});
}

GraphErrorKind error_kind(auto&& f) {
  try {
    f();
  } catch (const GraphError& e) {
    return e.kind();
  }
  FAIL("expected GraphError");
  return GraphErrorKind::Malformed;
}

}  // namespace

TEST_CASE("edges are oriented tail < head and sorted") {
  const auto g = four_node();
  REQUIRE(g.edge_count() == 4);
  CHECK(g.edges()[0] == Edge{VertexId("A"), VertexId("B")});
  CHECK(g.edges()[1] == Edge{VertexId("A"), VertexId("C")});
  CHECK(g.edges()[2] == Edge{VertexId("B"), VertexId("C")});
  CHECK(g.edges()[3] == Edge{VertexId("C"), VertexId("D")});
}

TEST_CASE("degrees and neighbors") {
  const auto g = four_node();
  CHECK(g.degree(VertexId("C")) == 3);
  CHECK(g.degree(VertexId("D")) == 1);
  CHECK(g.max_degree() == 3);
  const auto& nc = g.neighbors(VertexId("C"));
  REQUIRE(nc.size() == 3);
  CHECK(nc[0] == VertexId("A"));
  CHECK(nc[2] == VertexId("D"));
  CHECK(g.out_neighbors(VertexId("C")) == std::vector<VertexId>{VertexId("D")});
  CHECK(g.has_edge(VertexId("D"), VertexId("C")));
  CHECK_FALSE(g.has_edge(VertexId("A"), VertexId("D")));
  CHECK(g.canonical_edge(VertexId("C"), VertexId("A")) == Edge{VertexId("A"), VertexId("C")});
  CHECK(g.edge_index(VertexId("D"), VertexId("C")) == 3);
}

TEST_CASE("construction errors") {
  CHECK(error_kind([] { OrientedGraph::from_edge_list({}, {}); }) == GraphErrorKind::EmptyVertexSet);
  CHECK(error_kind([] { OrientedGraph::from_edge_list({"A", "A"}, {}); }) ==
        GraphErrorKind::DuplicateVertex);
  CHECK(error_kind([] { OrientedGraph::from_edge_list({"A"}, {{"A", "A"}}); }) ==
        GraphErrorKind::SelfLoop);
  CHECK(error_kind([] { OrientedGraph::from_edge_list({"A", "B"}, {{"A", "B"}, {"B", "A"}}); }) ==
        GraphErrorKind::DuplicateEdge);
  CHECK(error_kind([] { OrientedGraph::from_edge_list({"A"}, {{"A", "Z"}}); }) ==
        GraphErrorKind::UnknownVertex);
  CHECK(error_kind([] { OrientedGraph::from_edge_list({"A B"}, {}); }) ==
        GraphErrorKind::InvalidVertexName);
  CHECK(error_kind([] { OrientedGraph::from_edge_list({"A,B"}, {}); }) ==
        GraphErrorKind::InvalidVertexName);
  CHECK(error_kind([] { four_node().canonical_edge(VertexId("A"), VertexId("D")); }) ==
        GraphErrorKind::NotAnEdge);
  CHECK(error_kind([] { cycle_graph(2); }) == GraphErrorKind::InvalidSize);
}

TEST_CASE("json round trip is canonical") {
  const auto g = parse_graph(R"({"vertices": ["D","C","B","A"], "edges": [["C","D"],["B","A"],["C","A"],["B","C"]]})");
  const std::string text = serialize_graph(g);
  CHECK(text == serialize_graph(four_node()));
  CHECK(serialize_graph(parse_graph(text)) == text);
}

TEST_CASE("malformed json") {
  CHECK(error_kind([] { parse_graph("{"); }) == GraphErrorKind::Malformed);
  CHECK(error_kind([] { parse_graph(R"({"vertices": ["A"]})"); }) == GraphErrorKind::Malformed);
  CHECK(error_kind([] { parse_graph(R"({"vertices": ["A","B"], "edges": [["A"]]})"); }) ==
        GraphErrorKind::Malformed);
  CHECK(error_kind([] { parse_graph(R"({"vertices": [1], "edges": []})"); }) ==
        GraphErrorKind::Malformed);
}

TEST_CASE("cycle graph labels sort numerically") {
  const auto c12 = cycle_graph(12);
  CHECK(c12.vertices().front() == VertexId("00"));
  CHECK(c12.vertices().back() == VertexId("11"));
  CHECK(c12.edge_count() == 12);
  CHECK(c12.has_edge(VertexId("00"), VertexId("11")));
  for (const auto& v : c12.vertices()) CHECK(c12.degree(v) == 2);
  CHECK(cycle_graph(3).vertices().front() == VertexId("0"));
}

TEST_CASE("components") {
  const auto g = OrientedGraph::from_edge_list({"a", "b", "c", "d", "e"}, {{"a", "b"}, {"d", "e"}});
  const auto cc = g.connected_components();
  REQUIRE(cc.size() == 3);
  CHECK(cc[0].size() == 2);
  CHECK(cc[1] == std::vector<VertexId>{VertexId("c")});
  CHECK_FALSE(g.is_connected());
  CHECK(four_node().is_connected());
}

TEST_CASE("matchings") {
  const auto g = four_node();
  Matching m;
  m.insert({VertexId("A"), VertexId("B")});
  m.insert({VertexId("C"), VertexId("D")});
  CHECK(is_matching(g, m));
  Matching bad;
  bad.insert({VertexId("A"), VertexId("B")});
  bad.insert({VertexId("A"), VertexId("C")});
  CHECK_FALSE(is_matching(g, bad));
  Matching foreign;
  foreign.insert({VertexId("A"), VertexId("D")});
  CHECK_FALSE(is_matching(g, foreign));
  CHECK(is_matching(g, Matching{}));
}
