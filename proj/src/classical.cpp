#include "qdiffuse/classical.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qdiffuse/errors.hpp"

namespace qdiffuse {

namespace {

std::vector<std::size_t> active_vertices(const OrientedGraph& g) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < g.vertex_count(); ++i)
    if (!g.neighbor_indices(i).empty()) out.push_back(i);
  return out;
}

/// Visits every profile as a vector `choice` (choice[i] = picked neighbor
/// index, or i itself for isolated vertices).
template <class F>
void for_each_profile(const OrientedGraph& g, F&& f) {
  const auto active = active_vertices(g);
  std::vector<std::size_t> digit(active.size(), 0);
  std::vector<std::size_t> choice(g.vertex_count());
  for (std::size_t i = 0; i < choice.size(); ++i) choice[i] = i;
  for (std::size_t k = 0; k < active.size(); ++k) choice[active[k]] = g.neighbor_indices(active[k])[0];
  while (true) {
    f(static_cast<const std::vector<std::size_t>&>(choice));
    std::size_t k = 0;
    for (; k < active.size(); ++k) {
      const auto& nb = g.neighbor_indices(active[k]);
      if (++digit[k] < nb.size()) {
        choice[active[k]] = nb[digit[k]];
        break;
      }
      digit[k] = 0;
      choice[active[k]] = nb[0];
    }
    if (k == active.size()) return;
  }
}

std::vector<std::size_t> mutual_edges(const OrientedGraph& g, const std::vector<std::size_t>& choice) {
  std::vector<std::size_t> out;
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    const auto [t, h] = g.edge_endpoints(e);
    if (choice[t] == h && choice[h] == t) out.push_back(e);
  }
  return out;
}

void require_enumerable(const OrientedGraph& g) {
  const std::uint64_t n = profile_count(g);
  if (n > kMaxExactProfiles) {
    throw OracleLimitExceeded("exact enumeration limited to " + std::to_string(kMaxExactProfiles) +
                              " profiles per round (graph has " +
                              (n == UINT64_MAX ? std::string("more") : std::to_string(n)) + ")");
  }
}

Rational realized_p(const OrientedGraph& g, std::size_t a, std::size_t b) {
  return Rational(1, static_cast<long long>(g.neighbor_indices(a).size() * g.neighbor_indices(b).size()));
}

}  // namespace

std::uint64_t profile_count(const OrientedGraph& g) {
  std::uint64_t n = 1;
  for (std::size_t i = 0; i < g.vertex_count(); ++i) {
    const std::uint64_t d = g.neighbor_indices(i).size();
    if (d == 0) continue;
    if (n > UINT64_MAX / d) return UINT64_MAX;
    n *= d;
  }
  return n;
}

std::vector<WeightedProfile> enumerate_profiles(const OrientedGraph& g) {
  for (const auto& v : g.vertices()) {
    if (g.degree(v) == 0) {
      throw EngineError("cannot enumerate choice profiles: vertex '" + v.str() + "' is isolated");
    }
  }
  require_enumerable(g);
  const Rational p(1, static_cast<long long>(profile_count(g)));
  std::vector<WeightedProfile> out;
  for_each_profile(g, [&](const std::vector<std::size_t>& choice) {
    ChoiceProfile profile;
    for (std::size_t i = 0; i < choice.size(); ++i)
      profile.choice.emplace(g.vertices()[i], g.vertices()[choice[i]]);
    out.push_back({std::move(profile), p});
  });
  return out;
}

Matching profile_to_matching(const OrientedGraph& g, const ChoiceProfile& p) {
  for (const auto& [v, u] : p.choice) {
    if (!g.has_edge(v, u)) {
      throw EngineError("profile: '" + v.str() + "' picks non-neighbor '" + u.str() + "'");
    }
  }
  Matching m;
  for (const auto& e : g.edges()) {
    auto a = p.choice.find(e.tail);
    auto b = p.choice.find(e.head);
    if (a != p.choice.end() && b != p.choice.end() && a->second == e.head && b->second == e.tail)
      m.insert(e);
  }
  return m;
}

MatchingCensus matching_census(const OrientedGraph& g) {
  require_enumerable(g);
  MatchingCensus census;
  for_each_profile(g, [&](const std::vector<std::size_t>& choice) {
    ++census.counts[mutual_edges(g, choice)];
    ++census.total;
  });
  return census;
}

Rational edge_selection_probability(const OrientedGraph& g, const VertexId& u, const VertexId& v) {
  g.canonical_edge(u, v);
  return Rational(1, static_cast<long long>(g.degree(u) * g.degree(v)));
}

Rational enumerated_edge_probability(const OrientedGraph& g, const VertexId& u, const VertexId& v) {
  const std::size_t e = g.edge_index(u, v);
  const MatchingCensus census = matching_census(g);
  std::uint64_t hits = 0;
  for (const auto& [edges, count] : census.counts)
    if (std::binary_search(edges.begin(), edges.end(), e)) hits += count;
  return Rational(static_cast<long long>(hits), static_cast<long long>(census.total));
}

double solve_fixed_point(std::uint32_t delta) {
  // f(p) = p − (1 − p)^(2Δ) is strictly increasing with f(0) = −1, f(1) = 1.
  const double exponent = 2.0 * delta;
  auto f = [exponent](double p) { return p - std::pow(1.0 - p, exponent); };
  if (delta == 0) return 1.0;
  double lo = 0.0;
  double hi = 1.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (f(mid) < 0.0 ? lo : hi) = mid;
  }
  return std::abs(f(lo)) <= std::abs(f(hi)) ? lo : hi;
}

BoundReport check_probability_bound(const OrientedGraph& g) {
  BoundReport report;
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    const auto [u, v] = g.edge_endpoints(e);
    EdgeBound b{g.edges()[e], realized_p(g, u, v), Rational(1), false};
    for (std::size_t t : g.neighbor_indices(u))
      if (t != v) b.rhs *= 1 - realized_p(g, t, u);
    for (std::size_t w : g.neighbor_indices(v))
      if (w != u) b.rhs *= 1 - realized_p(g, v, w);
    b.satisfied = b.lhs <= b.rhs;
    report.all_satisfied = report.all_satisfied && b.satisfied;
    report.edges.push_back(std::move(b));
  }

  if (profile_count(g) > kMaxExactProfiles) return report;
  const MatchingCensus census = matching_census(g);
  const std::size_t m = g.edge_count();
  std::vector<std::uint64_t> single(m, 0);
  std::vector<std::vector<std::uint64_t>> joint(m, std::vector<std::uint64_t>(m, 0));
  for (const auto& [edges, count] : census.counts) {
    for (std::size_t a : edges) {
      single[a] += count;
      for (std::size_t b : edges) joint[a][b] += count;
    }
  }
  const auto total = static_cast<long long>(census.total);
  report.independence_checked = true;
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = a + 1; b < m; ++b) {
      const Edge& ea = g.edges()[a];
      const Edge& eb = g.edges()[b];
      PairCheck c{ea, eb, ea.shares_endpoint(eb),
                  Rational(static_cast<long long>(joint[a][b]), total), Rational(0), false};
      if (!c.adjacent) {
        c.expected = Rational(static_cast<long long>(single[a]), total) *
                     Rational(static_cast<long long>(single[b]), total);
      }
      c.holds = c.joint == c.expected;
      if (!c.holds) ++report.independence_violations;
      report.pairs.push_back(std::move(c));
    }
  }
  return report;
}

namespace {

std::vector<std::size_t> token_vector(const OrientedGraph& g, const TokenAssignment& tokens,
                                      const ExchangeRule& rule) {
  if (!rule.is_basis_permutation()) {
    throw EngineError("classical oracle needs a basis-permutation exchange rule ('" + rule.name() +
                      "' is not)");
  }
  std::vector<std::size_t> out;
  for (const auto& v : g.vertices()) {
    auto it = tokens.find(v);
    if (it == tokens.end()) throw EngineError("no token given for vertex '" + v.str() + "'");
    if (it->second >= rule.token_dim()) {
      throw EngineError("token at vertex '" + v.str() + "' out of range for the exchange rule");
    }
    out.push_back(it->second);
  }
  return out;
}

template <class Tokens>
void apply_matching(const OrientedGraph& g, const std::vector<std::size_t>& matching,
                    const ExchangeRule& rule, Tokens& tokens) {
  for (std::size_t e : matching) {
    const auto [t, h] = g.edge_endpoints(e);
    const auto [nt, nh] = rule.basis_image(tokens[t], tokens[h]);
    tokens[t] = static_cast<typename Tokens::value_type>(nt);
    tokens[h] = static_cast<typename Tokens::value_type>(nh);
  }
}

}  // namespace

ExactMarginals classical_diffuse_exact(const OrientedGraph& g, const TokenAssignment& tokens,
                                       std::uint32_t rounds, const ExchangeRule& rule) {
  if (rounds > kMaxExactRounds) {
    throw OracleLimitExceeded("exact enumeration limited to " + std::to_string(kMaxExactRounds) +
                              " rounds");
  }
  const auto start = token_vector(g, tokens, rule);
  std::map<std::vector<std::size_t>, Rational> dist{{start, Rational(1)}};
  if (rounds > 0) {
    const MatchingCensus census = matching_census(g);
    std::vector<std::pair<std::vector<std::size_t>, Rational>> moves;
    for (const auto& [edges, count] : census.counts)
      moves.emplace_back(edges, Rational(static_cast<long long>(count),
                                         static_cast<long long>(census.total)));
    for (std::uint32_t r = 0; r < rounds; ++r) {
      std::map<std::vector<std::size_t>, Rational> next;
      for (const auto& [state, p] : dist) {
        for (const auto& [edges, w] : moves) {
          auto moved = state;
          apply_matching(g, edges, rule, moved);
          next[moved] += p * w;
        }
      }
      dist = std::move(next);
    }
  }
  ExactMarginals out;
  for (const auto& [state, p] : dist)
    for (std::size_t i = 0; i < state.size(); ++i) out[g.vertices()[i]][state[i]] += p;
  return out;
}

std::map<VertexId, TokenDistribution> classical_diffuse_sampled(const OrientedGraph& g,
                                                                const TokenAssignment& tokens,
                                                                std::uint32_t rounds,
                                                                const ExchangeRule& rule,
                                                                std::uint64_t seed,
                                                                std::uint64_t samples) {
  if (samples == 0) throw EngineError("sampling needs at least one sample");
  const auto start = token_vector(g, tokens, rule);
  const std::size_t n = g.vertex_count();
  std::vector<std::map<std::size_t, std::uint64_t>> counts(n);
  Rng rng(seed);
  std::vector<std::size_t> state(n);
  std::vector<std::size_t> choice(n);
  std::vector<std::size_t> matching;
  for (std::uint64_t s = 0; s < samples; ++s) {
    state = start;
    for (std::uint32_t r = 0; r < rounds; ++r) {
      for (std::size_t i = 0; i < n; ++i) {
        const auto& nb = g.neighbor_indices(i);
        choice[i] = nb.empty() ? i : nb[rng.below(nb.size())];
      }
      matching = mutual_edges(g, choice);
      apply_matching(g, matching, rule, state);
    }
    for (std::size_t i = 0; i < n; ++i) ++counts[i][state[i]];
  }
  std::map<VertexId, TokenDistribution> out;
  for (std::size_t i = 0; i < n; ++i)
    for (const auto& [t, c] : counts[i])
      out[g.vertices()[i]][t] = static_cast<double>(c) / static_cast<double>(samples);
  return out;
}

std::map<VertexId, TokenDistribution> to_double(const ExactMarginals& m) {
  std::map<VertexId, TokenDistribution> out;
  for (const auto& [v, dist] : m)
    for (const auto& [t, p] : dist) out[v][t] = qdiffuse::to_double(p);
  return out;
}

}  // namespace qdiffuse
