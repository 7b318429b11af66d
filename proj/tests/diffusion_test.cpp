#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "qdiffuse/diffusion.hpp"
#include "qdiffuse/errors.hpp"
#include "support/dense_oracle.hpp"

using namespace qdiffuse;

namespace {

VertexId V(const char* s) { return VertexId(s); }

OrientedGraph four_node() {
  return OrientedGraph::from_edge_list({"A", "B", "C", "D"},
                                       {{"A", "B"}, {"A", "C"}, {"B", "C"}, {"C", "D"}});
}

TokenAssignment distinct_tokens(const OrientedGraph& g) {
  TokenAssignment t;
  std::size_t i = 0;
  for (const auto& v : g.vertices()) t[v] = i++;
  return t;
}

RunOptions coherent() {
  RunOptions o;
  o.mode = RoundMode::Coherent;
  return o;
}

double p(const TokenDistribution& d, std::size_t t) {
  auto it = d.find(t);
  return it == d.end() ? 0.0 : it->second;
}

}  // namespace

TEST_CASE("W unitary prepares the Bell-paired W state") {
  for (std::size_t deg = 1; deg <= 5; ++deg) {
    const auto u = build_w_unitary(deg);
    const std::size_t q = 2 * deg;
    CHECK(u.dim() == (std::size_t{1} << q));
    const auto col = u.column(0);
    REQUIRE(col.size() == deg);
    for (const auto& e : col) {
      CHECK(std::abs(e.value - 1.0 / std::sqrt(double(deg))) < 1e-15);
      // Exactly one neighbor j, set in both blocks.
      const std::size_t hi = e.row >> deg, lo = e.row & ((std::size_t{1} << deg) - 1);
      CHECK(hi == lo);
      CHECK(__builtin_popcountll(hi) == 1);
    }
  }
  CHECK_THROWS_AS(build_w_unitary(0), EngineError);
  CHECK_THROWS_AS(build_w_unitary(11), EngineError);
}

TEST_CASE("single edge swaps with certainty") {
  const auto g = OrientedGraph::from_edge_list({"A", "B"}, {{"A", "B"}});
  const auto r = run_rounds(g, {{V("A"), 0}, {V("B"), 1}}, 1, ExchangeRule::full_swap(2), 1);
  CHECK(p(r.marginals.at(V("A")), 1) == doctest::Approx(1.0));
  CHECK(p(r.marginals.at(V("B")), 0) == doctest::Approx(1.0));
  REQUIRE(r.matching_log.size() == 1);
  CHECK(r.matching_log[0].contains({V("A"), V("B")}));
}

TEST_CASE("zero rounds leaves point masses") {
  const auto g = four_node();
  const auto r = run_rounds(g, distinct_tokens(g), 0, ExchangeRule::full_swap(4), 3);
  for (const auto& [v, t] : distinct_tokens(g)) CHECK(p(r.marginals.at(v), t) == 1.0);
}

TEST_CASE("four node graph, one coherent round") {
  const auto g = four_node();
  const auto r = run_rounds(g, distinct_tokens(g), 1, ExchangeRule::full_swap(4), 0, coherent());
  const auto& a = r.marginals.at(V("A"));
  CHECK(std::abs(p(a, 0) - 7.0 / 12) < 1e-12);
  CHECK(std::abs(p(a, 1) - 3.0 / 12) < 1e-12);
  CHECK(std::abs(p(a, 2) - 2.0 / 12) < 1e-12);
  CHECK(p(a, 3) == 0.0);
  const auto& c = r.marginals.at(V("C"));
  CHECK(std::abs(p(c, 0) - 1.0 / 6) < 1e-12);
  CHECK(std::abs(p(c, 2) - 1.0 / 3) < 1e-12);
  CHECK(std::abs(p(c, 3) - 1.0 / 3) < 1e-12);
  const auto& d = r.marginals.at(V("D"));
  CHECK(std::abs(p(d, 3) - 2.0 / 3) < 1e-12);
  CHECK(r.support_size == 12);
}

TEST_CASE("four node graph, two coherent rounds") {
  const auto g = four_node();
  const auto r = run_rounds(g, distinct_tokens(g), 2, ExchangeRule::full_swap(4), 0, coherent());
  const auto& a = r.marginals.at(V("A"));
  CHECK(std::abs(p(a, 0) - 31.0 / 72) < 1e-12);
  CHECK(std::abs(p(a, 1) - 23.0 / 72) < 1e-12);
  CHECK(std::abs(p(a, 2) - 7.0 / 36) < 1e-12);
  CHECK(std::abs(p(a, 3) - 1.0 / 18) < 1e-12);
}

TEST_CASE("triangle spreads a single token") {
  const auto g = cycle_graph(3);
  const TokenAssignment t{{V("0"), 1}, {V("1"), 0}, {V("2"), 0}};
  auto r = run_rounds(g, t, 1, ExchangeRule::full_swap(2), 0, coherent());
  CHECK(std::abs(p(r.marginals.at(V("0")), 1) - 0.5) < 1e-12);
  CHECK(std::abs(p(r.marginals.at(V("1")), 1) - 0.25) < 1e-12);
  CHECK(std::abs(p(r.marginals.at(V("2")), 1) - 0.25) < 1e-12);
  r = run_rounds(g, t, 2, ExchangeRule::full_swap(2), 0, coherent());
  CHECK(std::abs(p(r.marginals.at(V("0")), 1) - 3.0 / 8) < 1e-12);
}

TEST_CASE("flag pair probabilities and matchings after consolidation") {
  const auto g = four_node();
  DiffusionRun run(g, distinct_tokens(g), ExchangeRule::full_swap(4), 0, coherent());
  run.prepare_coins();
  run.consolidate_flags();
  for (const auto& e : g.edges()) {
    const double expect = 1.0 / double(g.degree(e.tail) * g.degree(e.head));
    CHECK(std::abs(run.flag_pair_probability(e) - expect) < 1e-12);
  }
  const auto sets = run.selected_edge_sets();
  CHECK(sets.size() == 12);
  for (const auto& m : sets) CHECK(is_matching(g, m));
}

TEST_CASE("stage order is enforced") {
  const auto g = four_node();
  DiffusionRun run(g, distinct_tokens(g), ExchangeRule::full_swap(4), 0);
  CHECK_THROWS_AS(run.exchange_step(), ProtocolError);
  CHECK_THROWS_AS(run.consolidate_flags(), ProtocolError);
  CHECK_THROWS_AS(run.finish_round(), ProtocolError);
  run.prepare_coins();
  CHECK_THROWS_AS(run.prepare_coins(), ProtocolError);
  CHECK_THROWS_AS(run.swap_tokens(V("A"), V("B")), ProtocolError);
}

TEST_CASE("coherent round cap") {
  const auto g = OrientedGraph::from_edge_list({"A", "B"}, {{"A", "B"}});
  DiffusionRun run(g, {{V("A"), 0}, {V("B"), 1}}, ExchangeRule::full_swap(2), 0, coherent());
  for (int i = 0; i < 3; ++i) run.run_round();
  CHECK(run.round_index() == 3);
  CHECK_THROWS_AS(run.prepare_coins(), EngineError);
}

TEST_CASE("edge order does not change the state") {
  const auto g = four_node();
  DiffusionRun a(g, distinct_tokens(g), ExchangeRule::full_swap(4), 0, coherent());
  DiffusionRun b(g, distinct_tokens(g), ExchangeRule::full_swap(4), 0, coherent());
  for (auto* r : {&a, &b}) {
    r->prepare_coins();
    r->consolidate_flags();
  }
  a.exchange_step();
  std::vector<Edge> reversed(g.edges().rbegin(), g.edges().rend());
  b.exchange_step(reversed);
  CHECK(a.state().dump() == b.state().dump());
  std::vector<Edge> partial(g.edges().begin(), g.edges().begin() + 2);
  DiffusionRun c(g, distinct_tokens(g), ExchangeRule::full_swap(4), 0, coherent());
  c.prepare_coins();
  c.consolidate_flags();
  CHECK_THROWS_AS(c.exchange_step(partial), ProtocolError);
}

TEST_CASE("measured rounds log matchings of mutual choices") {
  const auto g = four_node();
  DiffusionRun run(g, distinct_tokens(g), ExchangeRule::full_swap(4), 42);
  for (int i = 0; i < 50; ++i) {
    run.run_round();
    CHECK(is_matching(g, run.matching_log().back()));
    CHECK(run.state().support_size() == 1);
  }
  CHECK(run.matching_log().size() == 50);
  for (const auto& s : run.stage_log()) CHECK(std::abs(s.norm - 1.0) < 1e-9);
  // Same seed, same trajectory.
  DiffusionRun again(g, distinct_tokens(g), ExchangeRule::full_swap(4), 42);
  for (int i = 0; i < 50; ++i) again.run_round();
  CHECK(again.matching_log() == run.matching_log());
}

TEST_CASE("directed qutrit rule") {
  const auto g = OrientedGraph::from_edge_list({"A", "B"}, {{"A", "B"}});
  auto r = run_rounds(g, {{V("A"), 0}, {V("B"), 1}}, 1, directed_exchange_matrix(), 0, coherent());
  CHECK(p(r.marginals.at(V("A")), 1) == doctest::Approx(1.0));
  CHECK(p(r.marginals.at(V("B")), 0) == doctest::Approx(1.0));
  r = run_rounds(g, {{V("A"), 1}, {V("B"), 2}}, 1, directed_exchange_matrix(), 0, coherent());
  CHECK(p(r.marginals.at(V("A")), 1) == doctest::Approx(1.0));
  CHECK(p(r.marginals.at(V("B")), 2) == doctest::Approx(1.0));
}

TEST_CASE("token validation") {
  const auto g = OrientedGraph::from_edge_list({"A", "B"}, {{"A", "B"}});
  CHECK_THROWS_AS(DiffusionRun(g, {{V("A"), 0}, {V("B"), 2}}, ExchangeRule::full_swap(2), 0),
                  EngineError);
  CHECK_THROWS_AS(DiffusionRun(g, {{V("A"), 0}, {V("Z"), 1}}, ExchangeRule::full_swap(2), 0),
                  EngineError);
}

TEST_CASE("quiescent components are skipped and unchanged") {
  const auto g = OrientedGraph::from_edge_list({"a", "b", "c", "d"}, {{"a", "b"}, {"c", "d"}});
  RunOptions o = coherent();
  o.skip_quiescent = true;
  DiffusionRun run(g, {{V("a"), 1}, {V("b"), 0}, {V("c"), 0}, {V("d"), 0}}, ExchangeRule::full_swap(2),
                   0, o);
  run.run_round();
  CHECK(run.quiescent_vertices() == std::vector<VertexId>{V("c"), V("d")});
  CHECK(p(run.vertex_marginal(V("b")), 1) == doctest::Approx(1.0));
  CHECK(p(run.vertex_marginal(V("c")), 0) == 1.0);
}

TEST_CASE("pipeline agrees with a dense simulation on a path") {
  const auto g = OrientedGraph::from_edge_list({"x", "y", "z"}, {{"x", "y"}, {"y", "z"}});
  const TokenAssignment tokens{{V("x"), 1}, {V("y"), 0}, {V("z"), 1}};
  DiffusionRun run(g, tokens, ExchangeRule::full_swap(2), 0, coherent());
  const RegisterSpace space = run.state().space();
  testing::DenseState dense(space, BasisAssignment::all_flags_zero(space, tokens));

  run.prepare_coins();
  for (const auto& v : g.vertices()) {
    std::vector<RegisterLabel> targets;
    for (int slot : {1, 2})
      for (const auto& u : g.neighbors(v)) targets.push_back(RegisterLabel::flag(v, u, slot, 0));
    dense.apply(targets, build_w_unitary(g.degree(v)).to_dense());
  }
  CHECK(dense.max_diff(run.state()) < 1e-12);

  run.consolidate_flags();
  for (const auto& e : g.edges()) {
    const RegisterLabel t[] = {RegisterLabel::flag(e.tail, e.head, 1, 0),
                               RegisterLabel::flag(e.head, e.tail, 1, 0)};
    dense.apply(t, Unitary::swap(2).to_dense());
  }
  CHECK(dense.max_diff(run.state()) < 1e-12);

  run.exchange_step();
  for (const auto& e : g.edges()) {
    const Control c[] = {{RegisterLabel::flag(e.tail, e.head, 1, 0), 1},
                         {RegisterLabel::flag(e.tail, e.head, 2, 0), 1}};
    const RegisterLabel t[] = {RegisterLabel::vertex(e.tail), RegisterLabel::vertex(e.head)};
    dense.apply(t, Unitary::swap(2).to_dense(), c);
  }
  CHECK(dense.max_diff(run.state()) < 1e-12);
}
