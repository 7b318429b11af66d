#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace qdiffuse {

/// Vertex label: a non-empty token without commas or whitespace.
class VertexId {
 public:
  explicit VertexId(std::string name);

  const std::string& str() const noexcept { return name_; }

  friend bool operator==(const VertexId&, const VertexId&) = default;
  friend std::strong_ordering operator<=>(const VertexId& a, const VertexId& b) {
    return a.name_.compare(b.name_) <=> 0;
  }

 private:
  std::string name_;
};

/// An edge with the canonical orientation tail < head.
struct Edge {
  VertexId tail;
  VertexId head;

  friend bool operator==(const Edge&, const Edge&) = default;
  friend std::strong_ordering operator<=>(const Edge& a, const Edge& b) {
    if (auto c = a.tail <=> b.tail; c != 0) return c;
    return a.head <=> b.head;
  }

  bool touches(const VertexId& v) const { return tail == v || head == v; }
  bool shares_endpoint(const Edge& other) const {
    return touches(other.tail) || touches(other.head);
  }
};

/// Finite undirected graph with the orientation "lexicographically smaller
/// endpoint is the tail" imposed on every edge. Immutable once built.
class OrientedGraph {
 public:
  /// Builds a graph; edge endpoints may be given in either order.
  /// Throws GraphError on an empty vertex set, invalid or duplicate vertex
  /// names, unknown endpoints, self-loops and duplicate edges.
  static OrientedGraph from_edge_list(
      const std::vector<std::string>& vertices,
      const std::vector<std::pair<std::string, std::string>>& edges);

  const std::vector<VertexId>& vertices() const noexcept { return vertices_; }
  /// Oriented edges sorted by (tail, head).
  const std::vector<Edge>& edges() const noexcept { return edges_; }

  std::size_t vertex_count() const noexcept { return vertices_.size(); }
  std::size_t edge_count() const noexcept { return edges_.size(); }

  bool contains(const VertexId& v) const { return index_.count(v) != 0; }
  std::size_t index_of(const VertexId& v) const;

  const std::vector<VertexId>& neighbors(const VertexId& v) const {
    return neighbors_[index_of(v)];
  }
  /// Heads of the edges whose tail is v, in lexicographic order.
  std::vector<VertexId> out_neighbors(const VertexId& v) const;
  std::size_t degree(const VertexId& v) const { return neighbors(v).size(); }
  std::size_t max_degree() const;

  bool has_edge(const VertexId& u, const VertexId& v) const;
  /// The oriented form of {u, v}; throws GraphError(NotAnEdge) otherwise.
  Edge canonical_edge(const VertexId& u, const VertexId& v) const;
  std::size_t edge_index(const VertexId& u, const VertexId& v) const;

  // Index-based views for hot loops; indices follow vertices() order.
  const std::vector<std::size_t>& neighbor_indices(std::size_t i) const {
    return neighbor_indices_[i];
  }
  std::pair<std::size_t, std::size_t> edge_endpoints(std::size_t e) const {
    return edge_endpoints_[e];
  }

  /// Connected components, each sorted, ordered by smallest member.
  std::vector<std::vector<VertexId>> connected_components() const;
  bool is_connected() const;

 private:
  std::vector<VertexId> vertices_;
  std::map<VertexId, std::size_t> index_;
  std::vector<std::vector<VertexId>> neighbors_;
  std::vector<std::vector<std::size_t>> neighbor_indices_;
  std::vector<Edge> edges_;
  std::vector<std::pair<std::size_t, std::size_t>> edge_endpoints_;
};

/// Parses `{"vertices": [...], "edges": [[u, v], ...]}`.
OrientedGraph parse_graph(std::string_view json_text);
/// Canonical document: vertices sorted, edges oriented and sorted.
std::string serialize_graph(const OrientedGraph& g);

/// C_n with vertices "0".."n-1", zero-padded so lexicographic order is
/// numeric order. Requires n >= 3.
OrientedGraph cycle_graph(std::size_t n);

/// A set of pairwise non-adjacent edges.
class Matching {
 public:
  Matching() = default;
  explicit Matching(std::set<Edge> edges) : edges_(std::move(edges)) {}

  void insert(Edge e) { edges_.insert(std::move(e)); }
  bool contains(const Edge& e) const { return edges_.count(e) != 0; }
  std::size_t size() const noexcept { return edges_.size(); }
  bool empty() const noexcept { return edges_.empty(); }
  auto begin() const { return edges_.begin(); }
  auto end() const { return edges_.end(); }

  friend bool operator==(const Matching&, const Matching&) = default;

 private:
  std::set<Edge> edges_;
};

/// True when every edge belongs to g and no two edges share a vertex.
bool is_matching(const OrientedGraph& g, const Matching& m);

}  // namespace qdiffuse
