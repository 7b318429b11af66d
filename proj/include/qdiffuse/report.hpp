#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "qdiffuse/classical.hpp"
#include "qdiffuse/graph.hpp"

namespace qdiffuse {

/// Rounds to 12 significant digits so reports diff cleanly.
double round12(double x);

/// vertex → token label → {"p": decimal[, "exact": "a/b"]}.
nlohmann::ordered_json marginals_json(const OrientedGraph& g,
                                      const std::map<VertexId, TokenDistribution>& marginals,
                                      const std::vector<std::string>& alphabet,
                                      const ExactMarginals* exact = nullptr);

nlohmann::ordered_json edge_probabilities_json(const OrientedGraph& g);
nlohmann::ordered_json bound_check_json(const BoundReport& report);

/// Edge probabilities, bound report and the fixed point for Δ = max degree.
nlohmann::ordered_json analyze_graph(const OrientedGraph& g);
nlohmann::ordered_json fixed_point_json(std::uint32_t delta);

std::string render_json(const nlohmann::ordered_json& doc);
/// `engine,vertex,token,p,exact` rows from a scenario report.
std::string render_marginals_csv(const nlohmann::ordered_json& report);
/// `tail,head,p,exact,lhs,rhs,satisfied` rows from an analysis document.
std::string render_analysis_csv(const nlohmann::ordered_json& analysis);

}  // namespace qdiffuse
