#include "qdiffuse/diffusion.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "qdiffuse/errors.hpp"

namespace qdiffuse {

namespace {

constexpr double kNormTolerance = 1e-9;
constexpr std::size_t kMaxWDegree = 10;

SparseState initial_state(const OrientedGraph& g, const TokenAssignment& tokens,
                          std::size_t token_dim) {
  for (const auto& [v, t] : tokens) {
    if (!g.contains(v)) throw EngineError("token given for unknown vertex '" + v.str() + "'");
    if (t >= token_dim) {
      throw EngineError("token " + std::to_string(t) + " at vertex '" + v.str() +
                        "' out of range for token dimension " + std::to_string(token_dim));
    }
  }
  RegisterSpace space = RegisterSpace::for_graph(g, token_dim, 1);
  BasisAssignment start = BasisAssignment::all_flags_zero(space, tokens);
  return SparseState::basis_state(std::move(space), start);
}

}  // namespace

std::string_view to_string(RoundMode mode) {
  return mode == RoundMode::Measured ? "measured" : "coherent";
}

Unitary build_w_unitary(std::size_t degree) {
  if (degree == 0) throw EngineError("W-state unitary needs degree >= 1");
  if (degree > kMaxWDegree) {
    throw EngineError("W-state unitary limited to degree <= " + std::to_string(kMaxWDegree));
  }
  const std::size_t qubits = 2 * degree;
  const std::size_t dim = std::size_t{1} << qubits;
  auto bit = [qubits](std::size_t q) { return std::size_t{1} << (qubits - 1 - q); };

  // Support of the W column: neighbor j selected in both slot blocks.
  std::vector<std::size_t> support;
  for (std::size_t j = 0; j < degree; ++j) support.push_back(bit(j) | bit(degree + j));
  std::sort(support.begin(), support.end());
  auto support_slot = [&](std::size_t k) -> std::ptrdiff_t {
    auto it = std::lower_bound(support.begin(), support.end(), k);
    return it != support.end() && *it == k ? it - support.begin() : -1;
  };

  std::vector<std::vector<MatrixEntry>> columns;
  columns.reserve(dim);
  const double amp = 1.0 / std::sqrt(static_cast<double>(degree));
  std::vector<std::vector<double>> span{std::vector<double>(degree, amp)};
  columns.push_back({});
  for (std::size_t k : support) columns.back().push_back({k, amp});

  // Standard basis vectors outside the support are already orthogonal to
  // every column so far; inside it, orthogonalize within the support.
  for (std::size_t k = 0; k < dim && columns.size() < dim; ++k) {
    const std::ptrdiff_t slot = support_slot(k);
    if (slot < 0) {
      columns.push_back({{k, 1.0}});
      continue;
    }
    std::vector<double> r(degree, 0.0);
    r[static_cast<std::size_t>(slot)] = 1.0;
    for (const auto& q : span) {
      const double dot = q[static_cast<std::size_t>(slot)];
      for (std::size_t i = 0; i < degree; ++i) r[i] -= dot * q[i];
    }
    double norm = 0.0;
    for (double x : r) norm += x * x;
    norm = std::sqrt(norm);
    if (norm < 1e-9) continue;
    for (double& x : r) x /= norm;
    columns.push_back({});
    for (std::size_t i = 0; i < degree; ++i)
      if (std::abs(r[i]) > 1e-15) columns.back().push_back({support[i], r[i]});
    span.push_back(std::move(r));
  }
  return Unitary::from_columns(dim, columns);
}

DiffusionRun::DiffusionRun(OrientedGraph graph, const TokenAssignment& tokens, ExchangeRule rule,
                           std::uint64_t seed, RunOptions options)
    : graph_(std::move(graph)),
      rule_(std::move(rule)),
      options_(options),
      seed_(seed),
      rng_(seed),
      state_(initial_state(graph_, tokens, rule_.token_dim())) {
  for (const auto& v : graph_.vertices()) initial_token_multiset_.push_back(tokens.at(v));
  std::sort(initial_token_multiset_.begin(), initial_token_multiset_.end());
  record("init");
}

RegisterLabel DiffusionRun::flag(const VertexId& owner, const VertexId& neighbor, int slot) const {
  return RegisterLabel::flag(owner, neighbor, slot, generation_);
}

void DiffusionRun::require_stage(Stage expected, std::string_view operation) const {
  if (stage_ != expected) {
    throw ProtocolError(std::string(operation) + " called out of order in round " +
                        std::to_string(round_index_));
  }
}

void DiffusionRun::record(std::string_view stage) {
  const double norm = state_.norm_squared();
  max_support_ = std::max(max_support_, state_.support_size());
  stage_log_.push_back({round_index_, std::string(stage), norm, state_.support_size()});
  if (std::abs(norm - 1.0) > kNormTolerance) {
    throw InvariantViolation("norm " + std::to_string(norm) + " after stage '" +
                             std::string(stage) + "' in round " + std::to_string(round_index_));
  }
}

const Unitary& DiffusionRun::w_unitary(std::size_t degree) {
  auto it = w_cache_.find(degree);
  if (it == w_cache_.end()) it = w_cache_.emplace(degree, build_w_unitary(degree)).first;
  return it->second;
}

void DiffusionRun::detect_quiescent() {
  quiescent_.clear();
  quiescent_token_.clear();
  if (!options_.skip_quiescent) return;
  for (const auto& component : graph_.connected_components()) {
    std::optional<std::size_t> common;
    bool quiet = true;
    for (const auto& v : component) {
      const auto t = state_.definite_value(RegisterLabel::vertex(v));
      if (!t || (common && *common != *t)) {
        quiet = false;
        break;
      }
      common = t;
    }
    if (!quiet || !rule_.fixes_pair(*common)) continue;
    for (const auto& v : component) {
      quiescent_.push_back(v);
      quiescent_token_[v] = *common;
    }
  }
}

bool DiffusionRun::edge_active(const Edge& e) const {
  // Components are closed under edges, so checking the tail suffices.
  return quiescent_token_.count(e.tail) == 0;
}

void DiffusionRun::prepare_coins() {
  require_stage(Stage::Ready, "prepare_coins");
  if (options_.mode == RoundMode::Coherent && round_index_ >= options_.coherent_round_cap) {
    throw EngineError("coherent round cap of " + std::to_string(options_.coherent_round_cap) +
                      " rounds exceeded");
  }
  std::vector<RegisterLabel> flags;
  for (const auto& v : graph_.vertices())
    for (const auto& u : graph_.neighbors(v))
      for (int slot : {1, 2}) flags.push_back(flag(v, u, slot));
  for (const auto& f : flags) {
    if (state_.definite_value(f) != std::optional<std::size_t>(0)) {
      throw ProtocolError("prepare_coins: flag '" + f.to_string() + "' is not |0>");
    }
  }

  detect_quiescent();
  for (const auto& v : graph_.vertices()) {
    const auto& neighbors = graph_.neighbors(v);
    if (neighbors.empty() || quiescent_token_.count(v)) continue;
    std::vector<RegisterLabel> targets;
    for (int slot : {1, 2})
      for (const auto& u : neighbors) targets.push_back(flag(v, u, slot));
    state_.apply(targets, w_unitary(neighbors.size()));
  }
  stage_ = Stage::CoinsPrepared;
  record("prepare_coins");
}

void DiffusionRun::consolidate_flags() {
  require_stage(Stage::CoinsPrepared, "consolidate_flags");
  const Unitary swap = Unitary::swap(2);
  for (const auto& e : graph_.edges()) {
    if (!edge_active(e)) continue;
    const RegisterLabel targets[] = {flag(e.tail, e.head, 1), flag(e.head, e.tail, 1)};
    state_.apply(targets, swap);
  }
  stage_ = Stage::FlagsConsolidated;
  record("consolidate_flags");
  check_independent_edges();
}

void DiffusionRun::exchange_step() { exchange_step(graph_.edges()); }

void DiffusionRun::exchange_step(std::span<const Edge> order) {
  require_stage(Stage::FlagsConsolidated, "exchange_step");
  std::set<Edge> seen;
  for (const auto& e : order) {
    if (!graph_.has_edge(e.tail, e.head) || e.tail > e.head || !seen.insert(e).second) {
      throw ProtocolError("exchange_step: edge order must list each oriented edge once");
    }
  }
  if (seen.size() != graph_.edge_count()) {
    throw ProtocolError("exchange_step: edge order must cover every edge");
  }
  for (const auto& e : order) {
    if (!edge_active(e)) continue;
    const Control controls[] = {{flag(e.tail, e.head, 1), 1}, {flag(e.tail, e.head, 2), 1}};
    const RegisterLabel targets[] = {RegisterLabel::vertex(e.tail), RegisterLabel::vertex(e.head)};
    state_.apply_controlled(controls, targets, rule_.unitary());
  }
  stage_ = Stage::Exchanged;
  record("exchange_step");
  if (rule_.is_full_swap()) check_token_conservation();
  check_quiescent_unchanged();
}

void DiffusionRun::finish_round() {
  require_stage(Stage::Exchanged, "finish_round");
  if (options_.mode == RoundMode::Measured) {
    std::vector<RegisterLabel> flags;
    for (const auto& e : graph_.edges())
      for (const auto& [a, b] : {std::pair{e.tail, e.head}, std::pair{e.head, e.tail}})
        for (int slot : {1, 2}) flags.push_back(flag(a, b, slot));
    const Measurement m = state_.measure(flags, rng_);
    Matching matching;
    for (std::size_t i = 0; i < graph_.edge_count(); ++i) {
      // Per edge: (tail,head,1), (tail,head,2), (head,tail,1), (head,tail,2).
      if (m.outcome[4 * i] == 1 && m.outcome[4 * i + 1] == 1) matching.insert(graph_.edges()[i]);
    }
    if (!is_matching(graph_, matching)) {
      throw InvariantViolation("measured flags selected adjacent edges in round " +
                               std::to_string(round_index_));
    }
    matching_log_.push_back(std::move(matching));
    state_.reset_to_zero(flags);
    ++round_index_;
  } else {
    ++round_index_;
    if (round_index_ < options_.coherent_round_cap) {
      generation_ = round_index_;
      state_.append_registers(RegisterSpace::flag_generation(graph_, generation_));
    }
  }
  stage_ = Stage::Ready;
  record("finish_round");
}

void DiffusionRun::run_round() {
  prepare_coins();
  consolidate_flags();
  exchange_step();
  finish_round();
}

void DiffusionRun::swap_tokens(const VertexId& a, const VertexId& b) {
  require_stage(Stage::Ready, "swap_tokens");
  const RegisterLabel targets[] = {RegisterLabel::vertex(a), RegisterLabel::vertex(b)};
  state_.apply(targets, Unitary::swap(rule_.token_dim()));
  record("swap_tokens");
}

TokenDistribution DiffusionRun::vertex_marginal(const VertexId& v) const {
  const RegisterLabel label[] = {RegisterLabel::vertex(v)};
  TokenDistribution out;
  const Distribution dist = state_.marginal(label);
  for (const auto& [o, p] : dist.support()) out[o[0]] += p;
  return out;
}

std::map<VertexId, TokenDistribution> DiffusionRun::vertex_marginals() const {
  std::map<VertexId, TokenDistribution> out;
  for (const auto& v : graph_.vertices()) out.emplace(v, vertex_marginal(v));
  return out;
}

double DiffusionRun::flag_pair_probability(const Edge& e) const {
  const RegisterLabel labels[] = {flag(e.tail, e.head, 1), flag(e.tail, e.head, 2)};
  return state_.marginal(labels).probability({1, 1});
}

std::vector<Matching> DiffusionRun::selected_edge_sets() const {
  const auto& space = state_.space();
  std::vector<std::pair<std::size_t, std::size_t>> pos;
  for (const auto& e : graph_.edges())
    pos.emplace_back(space.position(flag(e.tail, e.head, 1)), space.position(flag(e.tail, e.head, 2)));
  std::vector<Matching> out;
  state_.for_each_term([&](std::span<const Digit> key, Complex) {
    Matching m;
    for (std::size_t i = 0; i < pos.size(); ++i)
      if (key[pos[i].first] == 1 && key[pos[i].second] == 1) m.insert(graph_.edges()[i]);
    out.push_back(std::move(m));
  });
  return out;
}

void DiffusionRun::check_independent_edges() const {
  for (const auto& m : selected_edge_sets()) {
    if (!is_matching(graph_, m)) {
      throw InvariantViolation("a basis term selects two adjacent edges in round " +
                               std::to_string(round_index_));
    }
  }
}

void DiffusionRun::check_token_conservation() const {
  const auto& space = state_.space();
  std::vector<std::size_t> pos;
  for (const auto& v : graph_.vertices()) pos.push_back(space.position(RegisterLabel::vertex(v)));
  std::vector<std::size_t> tokens(pos.size());
  state_.for_each_term([&](std::span<const Digit> key, Complex) {
    for (std::size_t i = 0; i < pos.size(); ++i) tokens[i] = key[pos[i]];
    std::sort(tokens.begin(), tokens.end());
    if (tokens != initial_token_multiset_) {
      throw InvariantViolation("token multiset changed in round " + std::to_string(round_index_));
    }
  });
}

void DiffusionRun::check_quiescent_unchanged() const {
  for (const auto& [v, t] : quiescent_token_) {
    if (state_.definite_value(RegisterLabel::vertex(v)) != std::optional<std::size_t>(t)) {
      throw InvariantViolation("quiescent vertex '" + v.str() + "' changed in round " +
                               std::to_string(round_index_));
    }
  }
}

RoundsResult run_rounds(const OrientedGraph& graph, const TokenAssignment& tokens,
                        std::uint32_t rounds, const ExchangeRule& rule, std::uint64_t seed,
                        RunOptions options) {
  DiffusionRun run(graph, tokens, rule, seed, options);
  for (std::uint32_t r = 0; r < rounds; ++r) run.run_round();
  return {run.vertex_marginals(), run.matching_log(), run.state().support_size(),
          run.max_support_size()};
}

}  // namespace qdiffuse
