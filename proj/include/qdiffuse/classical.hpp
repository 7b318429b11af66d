#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "qdiffuse/diffusion.hpp"
#include "qdiffuse/errors.hpp"
#include "qdiffuse/exchange_rule.hpp"
#include "qdiffuse/graph.hpp"
#include "qdiffuse/rational.hpp"

namespace qdiffuse {

// Classical shadow of the protocol: every vertex picks a uniformly random
// neighbor, mutually picked edges form a matching, and the exchange rule is
// applied across each matched edge. For basis tokens and permutation rules
// this reproduces the quantum marginals exactly.

/// Exact mode enumerates at most this many choice profiles per round.
inline constexpr std::uint64_t kMaxExactProfiles = 1'000'000;
inline constexpr std::uint32_t kMaxExactRounds = 4;

class OracleLimitExceeded : public EngineError {
 public:
  using EngineError::EngineError;
};

/// Each vertex's picked neighbor.
struct ChoiceProfile {
  std::map<VertexId, VertexId> choice;
};

struct WeightedProfile {
  ChoiceProfile profile;
  Rational probability;
};

/// Π deg(v) over vertices of positive degree, saturating at UINT64_MAX.
std::uint64_t profile_count(const OrientedGraph& g);

/// All Π deg(v) profiles, each with probability Π 1/deg(v). Throws
/// EngineError if some vertex is isolated, OracleLimitExceeded past
/// kMaxExactProfiles.
std::vector<WeightedProfile> enumerate_profiles(const OrientedGraph& g);

/// Edges {u, v} with choice(u) = v and choice(v) = u.
Matching profile_to_matching(const OrientedGraph& g, const ChoiceProfile& p);

/// How many profiles induce each matching (keyed by sorted edge indices).
/// Isolated vertices take no part.
struct MatchingCensus {
  std::map<std::vector<std::size_t>, std::uint64_t> counts;
  std::uint64_t total = 0;
};
MatchingCensus matching_census(const OrientedGraph& g);

/// 1 / (deg u · deg v). Throws GraphError if {u, v} is not an edge.
Rational edge_selection_probability(const OrientedGraph& g, const VertexId& u, const VertexId& v);
/// Mass of the profiles whose matching contains {u, v}.
Rational enumerated_edge_probability(const OrientedGraph& g, const VertexId& u, const VertexId& v);

/// Root of p = (1 − p)^(2Δ) in [0, 1] by bisection to full double precision.
double solve_fixed_point(std::uint32_t delta);

struct EdgeBound {
  Edge edge;
  Rational lhs;  ///< p_{u,v} = 1/(deg u · deg v)
  Rational rhs;  ///< Π_{t∈N(u)\{v}} (1 − p_{t,u}) · Π_{w∈N(v)\{u}} (1 − p_{v,w})
  bool satisfied;
};

struct PairCheck {
  Edge first;
  Edge second;
  bool adjacent;
  Rational joint;     ///< enumerated P(both selected)
  Rational expected;  ///< P(first)·P(second) if disjoint, else 0
  bool holds;
};

struct BoundReport {
  std::vector<EdgeBound> edges;
  bool all_satisfied = true;
  /// False when the graph is too large to enumerate.
  bool independence_checked = false;
  std::vector<PairCheck> pairs;
  std::size_t independence_violations = 0;
};

/// Evaluates the independent-edge-set bound per edge with the protocol's
/// realized probabilities and checks the pairwise selection table
/// (independent for disjoint edges, exclusive for adjacent ones).
BoundReport check_probability_bound(const OrientedGraph& g);

using ExactMarginals = std::map<VertexId, std::map<std::size_t, Rational>>;

/// Exact per-vertex token distribution after `rounds` rounds, as a Markov
/// chain over token assignments. Throws OracleLimitExceeded past
/// kMaxExactProfiles per round or kMaxExactRounds; EngineError if the rule
/// is not a basis permutation.
ExactMarginals classical_diffuse_exact(const OrientedGraph& g, const TokenAssignment& tokens,
                                       std::uint32_t rounds, const ExchangeRule& rule);

/// Monte Carlo estimate from `samples` independent trajectories.
std::map<VertexId, TokenDistribution> classical_diffuse_sampled(const OrientedGraph& g,
                                                                const TokenAssignment& tokens,
                                                                std::uint32_t rounds,
                                                                const ExchangeRule& rule,
                                                                std::uint64_t seed,
                                                                std::uint64_t samples);

std::map<VertexId, TokenDistribution> to_double(const ExactMarginals& m);

}  // namespace qdiffuse
