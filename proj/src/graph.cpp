#include "qdiffuse/graph.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>

#include <json.hpp>

#include "qdiffuse/errors.hpp"

namespace qdiffuse {

namespace {

bool valid_vertex_name(const std::string& name) {
  if (name.empty()) return false;
  return std::none_of(name.begin(), name.end(), [](unsigned char c) {
    return c == ',' || std::isspace(c) != 0 || std::iscntrl(c) != 0;
  });
}

}  // namespace

VertexId::VertexId(std::string name) : name_(std::move(name)) {
  if (!valid_vertex_name(name_)) {
    throw GraphError(GraphErrorKind::InvalidVertexName,
                     "invalid vertex name '" + name_ +
                         "' (must be non-empty, without commas or whitespace)");
  }
}

OrientedGraph OrientedGraph::from_edge_list(
    const std::vector<std::string>& vertices,
    const std::vector<std::pair<std::string, std::string>>& edges) {
  if (vertices.empty()) {
    throw GraphError(GraphErrorKind::EmptyVertexSet, "graph has no vertices");
  }
  OrientedGraph g;
  for (const auto& name : vertices) {
    VertexId v(name);
    if (!g.index_.emplace(v, 0).second) {
      throw GraphError(GraphErrorKind::DuplicateVertex, "duplicate vertex '" + name + "'");
    }
  }
  for (const auto& [v, _] : g.index_) g.vertices_.push_back(v);
  for (std::size_t i = 0; i < g.vertices_.size(); ++i) g.index_[g.vertices_[i]] = i;

  std::set<Edge> edge_set;
  for (const auto& [a, b] : edges) {
    VertexId u(a);
    VertexId v(b);
    for (const auto* x : {&u, &v}) {
      if (!g.contains(*x)) {
        throw GraphError(GraphErrorKind::UnknownVertex,
                         "edge [" + a + "," + b + "] references unknown vertex '" +
                             x->str() + "'");
      }
    }
    if (u == v) {
      throw GraphError(GraphErrorKind::SelfLoop, "self-loop at vertex '" + a + "'");
    }
    Edge e = u < v ? Edge{u, v} : Edge{v, u};
    if (!edge_set.insert(e).second) {
      throw GraphError(GraphErrorKind::DuplicateEdge,
                       "duplicate edge [" + e.tail.str() + "," + e.head.str() + "]");
    }
  }

  g.edges_.assign(edge_set.begin(), edge_set.end());
  g.neighbors_.resize(g.vertices_.size());
  g.neighbor_indices_.resize(g.vertices_.size());
  for (const auto& e : g.edges_) {
    const std::size_t t = g.index_.at(e.tail);
    const std::size_t h = g.index_.at(e.head);
    g.edge_endpoints_.emplace_back(t, h);
    g.neighbor_indices_[t].push_back(h);
    g.neighbor_indices_[h].push_back(t);
  }
  for (std::size_t i = 0; i < g.vertices_.size(); ++i) {
    auto& idx = g.neighbor_indices_[i];
    std::sort(idx.begin(), idx.end());
    for (std::size_t j : idx) g.neighbors_[i].push_back(g.vertices_[j]);
  }
  return g;
}

std::size_t OrientedGraph::index_of(const VertexId& v) const {
  auto it = index_.find(v);
  if (it == index_.end()) {
    throw GraphError(GraphErrorKind::UnknownVertex, "unknown vertex '" + v.str() + "'");
  }
  return it->second;
}

std::vector<VertexId> OrientedGraph::out_neighbors(const VertexId& v) const {
  std::vector<VertexId> out;
  for (const auto& u : neighbors(v)) {
    if (v < u) out.push_back(u);
  }
  return out;
}

std::size_t OrientedGraph::max_degree() const {
  std::size_t best = 0;
  for (const auto& n : neighbors_) best = std::max(best, n.size());
  return best;
}

bool OrientedGraph::has_edge(const VertexId& u, const VertexId& v) const {
  if (!contains(u) || !contains(v) || u == v) return false;
  const Edge e = u < v ? Edge{u, v} : Edge{v, u};
  return std::binary_search(edges_.begin(), edges_.end(), e);
}

Edge OrientedGraph::canonical_edge(const VertexId& u, const VertexId& v) const {
  index_of(u);
  index_of(v);
  if (!has_edge(u, v)) {
    throw GraphError(GraphErrorKind::NotAnEdge,
                     "{" + u.str() + "," + v.str() + "} is not an edge");
  }
  return u < v ? Edge{u, v} : Edge{v, u};
}

std::size_t OrientedGraph::edge_index(const VertexId& u, const VertexId& v) const {
  const Edge e = canonical_edge(u, v);
  return static_cast<std::size_t>(
      std::lower_bound(edges_.begin(), edges_.end(), e) - edges_.begin());
}

std::vector<std::vector<VertexId>> OrientedGraph::connected_components() const {
  const std::size_t n = vertices_.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& [t, h] : edge_endpoints_) {
    const std::size_t a = find(t);
    const std::size_t b = find(h);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
  std::map<std::size_t, std::vector<VertexId>> groups;
  for (std::size_t i = 0; i < n; ++i) groups[find(i)].push_back(vertices_[i]);
  std::vector<std::vector<VertexId>> out;
  for (auto& [_, members] : groups) out.push_back(std::move(members));
  return out;
}

bool OrientedGraph::is_connected() const { return connected_components().size() == 1; }

OrientedGraph parse_graph(std::string_view json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw GraphError(GraphErrorKind::Malformed, std::string("graph JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("vertices") || !doc["vertices"].is_array()) {
    throw GraphError(GraphErrorKind::Malformed, "graph JSON: expected an object with a 'vertices' array");
  }
  std::vector<std::string> vertices;
  for (const auto& v : doc["vertices"]) {
    if (!v.is_string()) {
      throw GraphError(GraphErrorKind::Malformed, "graph JSON: vertex names must be strings");
    }
    vertices.push_back(v.get<std::string>());
  }
  std::vector<std::pair<std::string, std::string>> edges;
  if (!doc.contains("edges") || !doc["edges"].is_array()) {
    throw GraphError(GraphErrorKind::Malformed, "graph JSON: expected an 'edges' array");
  }
  for (const auto& e : doc["edges"]) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_string() || !e[1].is_string()) {
      throw GraphError(GraphErrorKind::Malformed,
                       "graph JSON: each edge must be a pair of vertex names");
    }
    edges.emplace_back(e[0].get<std::string>(), e[1].get<std::string>());
  }
  return OrientedGraph::from_edge_list(vertices, edges);
}

std::string serialize_graph(const OrientedGraph& g) {
  nlohmann::ordered_json doc;
  doc["vertices"] = nlohmann::ordered_json::array();
  for (const auto& v : g.vertices()) doc["vertices"].push_back(v.str());
  doc["edges"] = nlohmann::ordered_json::array();
  for (const auto& e : g.edges()) doc["edges"].push_back({e.tail.str(), e.head.str()});
  return doc.dump();
}

OrientedGraph cycle_graph(std::size_t n) {
  if (n < 3) {
    throw GraphError(GraphErrorKind::InvalidSize, "cycle graph needs at least 3 vertices");
  }
  const std::size_t width = std::to_string(n - 1).size();
  auto label = [width](std::size_t i) {
    std::string s = std::to_string(i);
    return std::string(width - s.size(), '0') + s;
  };
  std::vector<std::string> vertices;
  std::vector<std::pair<std::string, std::string>> edges;
  for (std::size_t i = 0; i < n; ++i) {
    vertices.push_back(label(i));
    edges.emplace_back(label(i), label((i + 1) % n));
  }
  return OrientedGraph::from_edge_list(vertices, edges);
}

bool is_matching(const OrientedGraph& g, const Matching& m) {
  std::set<VertexId> used;
  for (const auto& e : m) {
    if (!g.has_edge(e.tail, e.head)) return false;
    if (!used.insert(e.tail).second || !used.insert(e.head).second) return false;
  }
  return true;
}

}  // namespace qdiffuse
