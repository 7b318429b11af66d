#include "qdiffuse/report.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <fmt/format.h>

namespace qdiffuse {

using nlohmann::ordered_json;

double round12(double x) {
  const double r = std::stod(fmt::format("{:.12g}", x));
  return r == 0.0 ? 0.0 : r;
}

namespace {

ordered_json edge_json(const Edge& e) { return ordered_json::array({e.tail.str(), e.head.str()}); }

}  // namespace

ordered_json marginals_json(const OrientedGraph& g,
                            const std::map<VertexId, TokenDistribution>& marginals,
                            const std::vector<std::string>& alphabet, const ExactMarginals* exact) {
  ordered_json out = ordered_json::object();
  for (const auto& v : g.vertices()) {
    ordered_json row = ordered_json::object();
    const auto it = marginals.find(v);
    for (std::size_t t = 0; t < alphabet.size(); ++t) {
      double p = 0.0;
      if (it != marginals.end()) {
        if (auto jt = it->second.find(t); jt != it->second.end()) p = jt->second;
      }
      ordered_json cell;
      cell["p"] = round12(p);
      if (exact) {
        Rational q(0);
        if (auto et = exact->find(v); et != exact->end())
          if (auto ft = et->second.find(t); ft != et->second.end()) q = ft->second;
        cell["exact"] = to_string(q);
      }
      row[alphabet[t]] = std::move(cell);
    }
    out[v.str()] = std::move(row);
  }
  return out;
}

ordered_json edge_probabilities_json(const OrientedGraph& g) {
  const bool enumerable = profile_count(g) <= kMaxExactProfiles;
  MatchingCensus census;
  if (enumerable) census = matching_census(g);
  ordered_json out = ordered_json::array();
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    const Edge& edge = g.edges()[e];
    const Rational p = edge_selection_probability(g, edge.tail, edge.head);
    ordered_json row;
    row["edge"] = edge_json(edge);
    row["p"] = round12(to_double(p));
    row["exact"] = to_string(p);
    if (enumerable) {
      std::uint64_t hits = 0;
      for (const auto& [edges, count] : census.counts)
        if (std::binary_search(edges.begin(), edges.end(), e)) hits += count;
      row["enumerated"] = to_string(Rational(static_cast<long long>(hits),
                                             static_cast<long long>(census.total)));
    } else {
      row["enumerated"] = nullptr;
    }
    out.push_back(std::move(row));
  }
  return out;
}

ordered_json bound_check_json(const BoundReport& report) {
  ordered_json out;
  out["all_satisfied"] = report.all_satisfied;
  out["edges"] = ordered_json::array();
  for (const auto& b : report.edges) {
    ordered_json row;
    row["edge"] = edge_json(b.edge);
    row["lhs"] = round12(to_double(b.lhs));
    row["lhs_exact"] = to_string(b.lhs);
    row["rhs"] = round12(to_double(b.rhs));
    row["rhs_exact"] = to_string(b.rhs);
    row["satisfied"] = b.satisfied;
    out["edges"].push_back(std::move(row));
  }
  ordered_json ind;
  ind["checked"] = report.independence_checked;
  ind["pairs"] = report.pairs.size();
  ind["violations"] = report.independence_violations;
  out["independence"] = std::move(ind);
  return out;
}

ordered_json fixed_point_json(std::uint32_t delta) {
  const double p = solve_fixed_point(delta);
  ordered_json out;
  out["delta"] = delta;
  out["p"] = round12(p);
  out["residual"] = std::abs(p - std::pow(1.0 - p, 2.0 * delta));
  return out;
}

ordered_json analyze_graph(const OrientedGraph& g) {
  ordered_json out;
  out["graph"] = ordered_json::parse(serialize_graph(g));
  out["max_degree"] = g.max_degree();
  out["profile_count"] = profile_count(g);
  out["edge_probabilities"] = edge_probabilities_json(g);
  out["bound_check"] = bound_check_json(check_probability_bound(g));
  out["fixed_point"] = fixed_point_json(static_cast<std::uint32_t>(g.max_degree()));
  return out;
}

std::string render_json(const ordered_json& doc) { return doc.dump(2) + "\n"; }

std::string render_marginals_csv(const ordered_json& report) {
  std::string out = "engine,vertex,token,p,exact\n";
  for (const auto& [engine, body] : report.at("engines").items()) {
    for (const auto& [vertex, row] : body.at("marginals").items()) {
      for (const auto& [token, cell] : row.items()) {
        out += fmt::format("{},{},{},{:.12g},{}\n", engine, vertex, token, cell.at("p").get<double>(),
                           cell.contains("exact") ? cell.at("exact").get<std::string>() : "");
      }
    }
  }
  return out;
}

std::string render_analysis_csv(const ordered_json& analysis) {
  std::string out = "tail,head,p,exact,lhs,rhs,satisfied\n";
  const auto& probs = analysis.at("edge_probabilities");
  const auto& bounds = analysis.at("bound_check").at("edges");
  for (std::size_t i = 0; i < probs.size(); ++i) {
    out += fmt::format("{},{},{:.12g},{},{},{},{}\n", probs[i]["edge"][0].get<std::string>(),
                       probs[i]["edge"][1].get<std::string>(), probs[i]["p"].get<double>(),
                       probs[i]["exact"].get<std::string>(), bounds[i]["lhs_exact"].get<std::string>(),
                       bounds[i]["rhs_exact"].get<std::string>(),
                       bounds[i]["satisfied"].get<bool>() ? "true" : "false");
  }
  return out;
}

}  // namespace qdiffuse
