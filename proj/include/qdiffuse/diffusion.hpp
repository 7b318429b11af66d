#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qdiffuse/exchange_rule.hpp"
#include "qdiffuse/graph.hpp"
#include "qdiffuse/sparse_state.hpp"

namespace qdiffuse {

/// How flags are handled between rounds.
///  - Measured: flags are measured after the exchange, the selected matching
///    is logged and the flags are reset to |0⟩.
///  - Coherent: flags are never measured; each round gets a fresh
///    generation of flag registers.
enum class RoundMode { Measured, Coherent };

std::string_view to_string(RoundMode mode);

struct RunOptions {
  RoundMode mode = RoundMode::Measured;
  /// Coherent runs grow by 4|E| qubits per round.
  std::uint32_t coherent_round_cap = 3;
  /// Skip coin preparation and exchange on connected components whose
  /// tokens are all equal (and fixed by the rule); they are verified
  /// unchanged after the exchange instead.
  bool skip_quiescent = false;
};

using TokenAssignment = std::map<VertexId, std::size_t>;
using TokenDistribution = std::map<std::size_t, double>;

/// Unitary on 2·deg qubits ordered (v,u_1,1)…(v,u_deg,1),(v,u_1,2)…(v,u_deg,2)
/// mapping |0…0⟩ to the Bell-paired deg-W-state
/// (1/√deg) Σ_j |δ_{j,u}⟩…|δ_{j,u}⟩. The remaining columns are completed by
/// Gram–Schmidt over the standard basis in index order.
/// Throws EngineError for deg = 0 or deg > 10.
Unitary build_w_unitary(std::size_t degree);

struct StageRecord {
  std::uint32_t round;
  std::string stage;
  double norm;
  std::size_t support;
};

/// One simulation of the diffusion protocol on a graph. Each round is
/// prepare_coins → consolidate_flags → exchange_step → finish_round; every
/// stage checks norm conservation, and the selected edges of every basis
/// term are checked to form a matching after consolidation.
class DiffusionRun {
 public:
  DiffusionRun(OrientedGraph graph, const TokenAssignment& tokens, ExchangeRule rule,
               std::uint64_t seed, RunOptions options = {});

  /// Puts each vertex's flag block into its Bell-paired W-state, vertices
  /// in lexicographic order. Degree-0 vertices are skipped.
  void prepare_coins();
  /// Swaps Flag(v,u,1) with Flag(u,v,1) for every oriented edge (v,u).
  void consolidate_flags();
  /// Applies the exchange rule to (Vertex(v), Vertex(u)) controlled on
  /// Flag(v,u,1) = Flag(v,u,2) = 1, edges in lexicographic order.
  void exchange_step();
  /// Same, with the edges visited in the given order.
  void exchange_step(std::span<const Edge> order);
  void finish_round();
  void run_round();

  /// Swaps the token registers of two vertices; only between rounds.
  void swap_tokens(const VertexId& a, const VertexId& b);

  const OrientedGraph& graph() const noexcept { return graph_; }
  const SparseState& state() const noexcept { return state_; }
  const ExchangeRule& rule() const noexcept { return rule_; }
  RoundMode mode() const noexcept { return options_.mode; }
  std::uint64_t seed() const noexcept { return seed_; }
  std::uint32_t round_index() const noexcept { return round_index_; }
  std::uint32_t flag_generation() const noexcept { return generation_; }
  const std::vector<Matching>& matching_log() const noexcept { return matching_log_; }
  const std::vector<StageRecord>& stage_log() const noexcept { return stage_log_; }
  std::size_t max_support_size() const noexcept { return max_support_; }
  /// Vertices skipped as quiescent in the most recent round.
  const std::vector<VertexId>& quiescent_vertices() const noexcept { return quiescent_; }

  /// Flag label of the current generation.
  RegisterLabel flag(const VertexId& owner, const VertexId& neighbor, int slot) const;

  TokenDistribution vertex_marginal(const VertexId& v) const;
  std::map<VertexId, TokenDistribution> vertex_marginals() const;
  /// P(Flag(tail,head,1) = Flag(tail,head,2) = 1) in the current state.
  double flag_pair_probability(const Edge& e) const;
  /// For every basis term, the edges whose current flag pair reads (1,1).
  std::vector<Matching> selected_edge_sets() const;

 private:
  enum class Stage { Ready, CoinsPrepared, FlagsConsolidated, Exchanged };

  void require_stage(Stage expected, std::string_view operation) const;
  void record(std::string_view stage);
  void detect_quiescent();
  bool edge_active(const Edge& e) const;
  void check_independent_edges() const;
  void check_token_conservation() const;
  void check_quiescent_unchanged() const;
  const Unitary& w_unitary(std::size_t degree);

  OrientedGraph graph_;
  ExchangeRule rule_;
  RunOptions options_;
  std::uint64_t seed_;
  Rng rng_;
  SparseState state_;
  Stage stage_ = Stage::Ready;
  std::uint32_t round_index_ = 0;
  std::uint32_t generation_ = 0;
  std::vector<Matching> matching_log_;
  std::vector<StageRecord> stage_log_;
  std::size_t max_support_ = 1;
  std::vector<std::size_t> initial_token_multiset_;
  std::vector<VertexId> quiescent_;
  std::map<VertexId, std::size_t> quiescent_token_;
  std::map<std::size_t, Unitary> w_cache_;
};

struct RoundsResult {
  std::map<VertexId, TokenDistribution> marginals;
  std::vector<Matching> matching_log;
  std::size_t support_size = 0;
  std::size_t max_support_size = 0;
};

/// Runs `rounds` full rounds and returns final per-vertex token marginals
/// (conditioned on the sampled trajectory in Measured mode).
RoundsResult run_rounds(const OrientedGraph& graph, const TokenAssignment& tokens,
                        std::uint32_t rounds, const ExchangeRule& rule, std::uint64_t seed,
                        RunOptions options = {});

}  // namespace qdiffuse
