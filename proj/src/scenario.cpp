#include "qdiffuse/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "qdiffuse/classical.hpp"
#include "qdiffuse/errors.hpp"
#include "qdiffuse/report.hpp"
#include "qdiffuse/rng.hpp"

namespace qdiffuse {

using nlohmann::ordered_json;

namespace {

constexpr double kExactAgreement = 1e-9;
constexpr double kSigmaBound = 3.0;

[[noreturn]] void field_error(std::string_view field, const std::string& what) {
  throw ConfigError(std::string(field) + ": " + what);
}

std::string read_file(const std::filesystem::path& path, std::string_view field) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(std::string(field) + ": cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

ordered_json edge_json(const Edge& e) { return ordered_json::array({e.tail.str(), e.head.str()}); }

std::string rule_name(RuleKind k) {
  switch (k) {
    case RuleKind::FullSwap: return "full_swap";
    case RuleKind::DirectedQutrit: return "directed_qutrit";
    case RuleKind::Matrix: return "matrix";
  }
  return "?";
}

std::string engine_name(EngineChoice e) {
  switch (e) {
    case EngineChoice::Quantum: return "quantum";
    case EngineChoice::Classical: return "classical";
    case EngineChoice::Both: return "both";
  }
  return "?";
}

std::string method_name(ClassicalMethod m) {
  switch (m) {
    case ClassicalMethod::Auto: return "auto";
    case ClassicalMethod::Exact: return "exact";
    case ClassicalMethod::Sampling: return "sampling";
  }
  return "?";
}

std::uint64_t get_count(const ordered_json& j, std::string_view field, std::uint64_t min) {
  if (!j.is_number_integer()) field_error(field, "expected a non-negative integer");
  if (j.is_number_unsigned()) {
    const auto v = j.get<std::uint64_t>();
    if (v < min) field_error(field, "must be >= " + std::to_string(min));
    return v;
  }
  const auto v = j.get<std::int64_t>();
  if (v < 0 || static_cast<std::uint64_t>(v) < min)
    field_error(field, "must be >= " + std::to_string(min));
  return static_cast<std::uint64_t>(v);
}

const std::string& get_string(const ordered_json& j, std::string_view field) {
  if (!j.is_string()) field_error(field, "expected a string");
  return j.get_ref<const std::string&>();
}

VertexId get_vertex(const std::string& s, std::string_view field) {
  try {
    return VertexId(s);
  } catch (const GraphError& e) {
    field_error(field, e.what());
  }
}

OrientedGraph watrous_graph() {
  std::vector<std::string> names;
  for (int i = 0; i < 15; ++i) names.push_back(fmt::format("{:02d}", i));
  std::vector<std::pair<std::string, std::string>> edges;
  for (int b = 0; b < 5; ++b) {
    const int i = 3 * b;
    edges.emplace_back(names[i], names[i + 1]);
    edges.emplace_back(names[i + 1], names[i + 2]);
    edges.emplace_back(names[i], names[i + 2]);
  }
  return OrientedGraph::from_edge_list(names, edges);
}

OrientedGraph four_node_graph() {
  return OrientedGraph::from_edge_list({"A", "B", "C", "D"},
                                       {{"A", "B"}, {"A", "C"}, {"B", "C"}, {"C", "D"}});
}

ExchangeRule make_rule(const ScenarioConfig& cfg, std::size_t alphabet_size) {
  switch (cfg.rule) {
    case RuleKind::FullSwap: return ExchangeRule::full_swap(std::max<std::size_t>(alphabet_size, 1));
    case RuleKind::DirectedQutrit: return ExchangeRule::directed_qutrit();
    case RuleKind::Matrix: return ExchangeRule::custom(cfg.matrix, cfg.matrix_source);
  }
  throw ConfigError("rule: unknown kind");
}

/// Alphabet padded up to the rule's token dimension.
std::vector<std::string> padded_alphabet(std::vector<std::string> alphabet, std::size_t dim) {
  std::set<std::string> used(alphabet.begin(), alphabet.end());
  for (std::size_t k = alphabet.size(); k < dim; ++k) {
    std::string label = std::to_string(k);
    while (used.count(label)) label = "#" + label;
    used.insert(label);
    alphabet.push_back(label);
  }
  return alphabet;
}

TokenAssignment token_indices(const ScenarioConfig& cfg, const std::vector<std::string>& alphabet) {
  TokenAssignment out;
  for (const auto& [v, label] : cfg.initial_tokens) {
    const auto it = std::find(alphabet.begin(), alphabet.end(), label);
    out[v] = static_cast<std::size_t>(it - alphabet.begin());
  }
  return out;
}

void apply_pre_swaps(const ScenarioConfig& cfg, TokenAssignment& tokens) {
  for (const auto& [a, b] : cfg.pre_swaps) std::swap(tokens.at(a), tokens.at(b));
}

ordered_json config_json(const ScenarioConfig& cfg, const std::vector<std::string>& alphabet) {
  ordered_json j;
  j["name"] = cfg.name;
  j["graph_source"] = cfg.graph_source;
  j["graph"] = ordered_json::parse(serialize_graph(cfg.graph));
  ordered_json tokens = ordered_json::object();
  for (const auto& [v, label] : cfg.initial_tokens) tokens[v.str()] = label;
  j["initial_tokens"] = std::move(tokens);
  j["token_alphabet"] = alphabet;
  j["rounds"] = cfg.rounds;
  j["mode"] = std::string(to_string(cfg.mode));
  if (cfg.rule == RuleKind::Matrix) {
    j["rule"] = ordered_json{{"matrix_file", cfg.matrix_source}};
  } else {
    j["rule"] = rule_name(cfg.rule);
  }
  j["engine"] = engine_name(cfg.engine);
  j["samples"] = cfg.samples;
  j["classical_method"] = method_name(cfg.classical_method);
  j["quantum_trials"] = cfg.quantum_trials;
  ordered_json swaps = ordered_json::array();
  for (const auto& [a, b] : cfg.pre_swaps) swaps.push_back({a.str(), b.str()});
  j["pre_swaps"] = std::move(swaps);
  j["skip_quiescent"] = cfg.skip_quiescent;
  return j;
}

struct QuantumOutcome {
  std::map<VertexId, TokenDistribution> marginals;
  std::vector<Matching> first_log;
  std::size_t support_size = 0;
  std::size_t max_support_size = 0;
  std::vector<VertexId> quiescent;
  /// P(flag pair = (1,1)) per edge after the first consolidation, averaged.
  std::vector<std::optional<double>> flag_pair;
};

QuantumOutcome run_quantum(const ScenarioConfig& cfg, const TokenAssignment& tokens,
                           const ExchangeRule& rule, Rng stream) {
  QuantumOutcome out;
  RunOptions options;
  options.mode = cfg.mode;
  options.skip_quiescent = cfg.skip_quiescent;
  const std::uint64_t trials = cfg.mode == RoundMode::Coherent ? 1 : cfg.quantum_trials;
  const std::size_t ne = cfg.graph.edge_count();
  std::vector<double> flag_sum(ne, 0.0);
  std::vector<bool> flag_seen(ne, false);
  std::map<VertexId, std::map<std::size_t, double>> sum;

  for (std::uint64_t trial = 0; trial < trials; ++trial) {
    DiffusionRun run(cfg.graph, tokens, rule, stream.next(), options);
    for (const auto& [a, b] : cfg.pre_swaps) run.swap_tokens(a, b);
    for (std::uint32_t r = 0; r < cfg.rounds; ++r) {
      run.prepare_coins();
      run.consolidate_flags();
      if (r == 0) {
        std::set<VertexId> quiet(run.quiescent_vertices().begin(), run.quiescent_vertices().end());
        for (std::size_t e = 0; e < ne; ++e) {
          const Edge& edge = cfg.graph.edges()[e];
          if (quiet.count(edge.tail)) continue;
          flag_sum[e] += run.flag_pair_probability(edge);
          flag_seen[e] = true;
        }
        if (trial == 0) out.quiescent = run.quiescent_vertices();
      }
      run.exchange_step();
      run.finish_round();
    }
    for (const auto& [v, dist] : run.vertex_marginals())
      for (const auto& [t, p] : dist) sum[v][t] += p;
    if (trial == 0) {
      out.first_log = run.matching_log();
      out.support_size = run.state().support_size();
    }
    out.max_support_size = std::max(out.max_support_size, run.max_support_size());
  }
  for (auto& [v, dist] : sum)
    for (auto& [t, p] : dist) out.marginals[v][t] = p / static_cast<double>(trials);
  out.flag_pair.resize(ne);
  for (std::size_t e = 0; e < ne; ++e)
    if (flag_seen[e] && cfg.rounds > 0) out.flag_pair[e] = flag_sum[e] / static_cast<double>(trials);
  return out;
}

struct ClassicalOutcome {
  std::map<VertexId, TokenDistribution> marginals;
  std::optional<ExactMarginals> exact;
  std::string method;
};

ClassicalOutcome run_classical(const ScenarioConfig& cfg, const TokenAssignment& tokens,
                               const ExchangeRule& rule, std::uint64_t seed) {
  ClassicalOutcome out;
  const bool exact_feasible = cfg.rounds <= kMaxExactRounds && profile_count(cfg.graph) <= kMaxExactProfiles;
  bool use_exact = cfg.classical_method == ClassicalMethod::Exact ||
                   (cfg.classical_method == ClassicalMethod::Auto && exact_feasible);
  if (use_exact) {
    try {
      out.exact = classical_diffuse_exact(cfg.graph, tokens, cfg.rounds, rule);
      out.marginals = to_double(*out.exact);
      out.method = "exact";
      return out;
    } catch (const OracleLimitExceeded&) {
      if (cfg.classical_method == ClassicalMethod::Exact) throw;
    }
  }
  out.marginals = classical_diffuse_sampled(cfg.graph, tokens, cfg.rounds, rule, seed, cfg.samples);
  out.method = "sampling";
  return out;
}

double cell(const std::map<VertexId, TokenDistribution>& m, const VertexId& v, std::size_t t) {
  const auto it = m.find(v);
  if (it == m.end()) return 0.0;
  const auto jt = it->second.find(t);
  return jt == it->second.end() ? 0.0 : jt->second;
}

/// Compares the two engines. An exact comparison is made when the quantum
/// marginals are exact (coherent) and the classical ones are enumerated;
/// otherwise each cell's difference is scored against its binomial spread.
ordered_json agreement_json(const ScenarioConfig& cfg, const QuantumOutcome& q,
                            const ClassicalOutcome& c, std::size_t dim) {
  ordered_json out;
  const bool quantum_exact = cfg.mode == RoundMode::Coherent;
  const bool classical_exact = c.method == "exact";
  double max_diff = 0.0;
  double max_z = 0.0;
  bool unbounded = false;
  for (const auto& v : cfg.graph.vertices()) {
    for (std::size_t t = 0; t < dim; ++t) {
      const double pq = cell(q.marginals, v, t);
      const double pc = cell(c.marginals, v, t);
      const double diff = std::abs(pq - pc);
      max_diff = std::max(max_diff, diff);
      double var = 0.0;
      const double p = pc;
      if (!quantum_exact) var += p * (1 - p) / static_cast<double>(cfg.quantum_trials);
      if (!classical_exact) var += p * (1 - p) / static_cast<double>(cfg.samples);
      const double sigma = std::sqrt(var);
      if (sigma > 0) {
        max_z = std::max(max_z, diff / sigma);
      } else if (diff > kExactAgreement) {
        unbounded = true;
      }
    }
  }
  max_diff = round12(max_diff);
  if (quantum_exact && classical_exact) {
    out["method"] = "exact";
    out["max_abs_diff"] = max_diff;
    out["tolerance"] = kExactAgreement;
    out["within"] = max_diff <= kExactAgreement;
  } else {
    out["method"] = "statistical";
    out["max_abs_diff"] = max_diff;
    if (unbounded) {
      out["max_z"] = nullptr;
    } else {
      out["max_z"] = round12(max_z);
    }
    out["z_bound"] = kSigmaBound;
    out["within"] = !unbounded && max_z <= kSigmaBound;
  }
  return out;
}

ordered_json matchings_json(const std::vector<Matching>& log) {
  ordered_json out = ordered_json::array();
  for (const auto& m : log) {
    ordered_json round = ordered_json::array();
    for (const auto& e : m) round.push_back(edge_json(e));
    out.push_back(std::move(round));
  }
  return out;
}

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

}  // namespace

const std::vector<std::string>& builtin_scenario_names() {
  static const std::vector<std::string> names{"paper-4node", "watrous-c15", "triangle",
                                              "single-edge"};
  return names;
}

OrientedGraph builtin_graph(std::string_view name) {
  if (name == "paper-4node") return four_node_graph();
  if (name == "watrous-c15") return watrous_graph();
  if (name == "triangle") return cycle_graph(3);
  if (name == "single-edge") return OrientedGraph::from_edge_list({"A", "B"}, {{"A", "B"}});
  throw ConfigError("unknown builtin '" + std::string(name) + "'");
}

ScenarioConfig builtin_scenario(std::string_view name) {
  ScenarioConfig cfg;
  cfg.name = std::string(name);
  cfg.graph_source = std::string(name);
  cfg.graph = builtin_graph(name);
  cfg.mode = RoundMode::Coherent;
  cfg.rounds = 1;
  cfg.engine = EngineChoice::Both;
  if (name == "paper-4node") {
    for (const char* v : {"A", "B", "C", "D"})
      cfg.initial_tokens.emplace_back(VertexId(v), std::string(1, static_cast<char>(v[0] - 'A' + 'a')));
  } else if (name == "single-edge") {
    cfg.initial_tokens = {{VertexId("A"), "a"}, {VertexId("B"), "b"}};
  } else {
    // One "1" token among zeros.
    cfg.token_alphabet = {"0", "1"};
    for (const auto& v : cfg.graph.vertices())
      cfg.initial_tokens.emplace_back(v, v == cfg.graph.vertices().front() ? "1" : "0");
  }
  if (name == "watrous-c15") {
    // Outer ring 0,3,…,12 rotates back by 3 and inner ring 2,5,…,14 forward
    // by 3, leaving the token in block {12,13,14}; the other blocks are
    // all-zero and sit out the round.
    for (int i = 0; i < 12; i += 3)
      cfg.pre_swaps.emplace_back(VertexId(fmt::format("{:02d}", i)),
                                 VertexId(fmt::format("{:02d}", i + 3)));
    for (int i = 14; i > 2; i -= 3)
      cfg.pre_swaps.emplace_back(VertexId(fmt::format("{:02d}", i)),
                                 VertexId(fmt::format("{:02d}", i - 3)));
    cfg.skip_quiescent = true;
  }
  return cfg;
}

ScenarioConfig parse_scenario(std::string_view json_text, const std::filesystem::path& base_dir) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(json_text);
  } catch (const ordered_json::parse_error& e) {
    throw ConfigError(std::string("scenario: invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("scenario: expected a JSON object");
  static const std::set<std::string> known{
      "name",    "graph",  "initial_tokens", "token_alphabet",   "rounds",         "mode",
      "rule",    "seed",   "engine",         "samples",          "classical_method",
      "quantum_trials",    "pre_swaps",      "skip_quiescent"};
  for (const auto& [key, value] : doc.items())
    if (!known.count(key)) field_error(key, "unknown field");

  ScenarioConfig cfg;
  if (doc.contains("name")) cfg.name = get_string(doc["name"], "name");

  if (!doc.contains("graph")) field_error("graph", "required");
  const auto& g = doc["graph"];
  try {
    if (g.is_string()) {
      const std::string& src = g.get_ref<const std::string&>();
      const auto& names = builtin_scenario_names();
      if (std::find(names.begin(), names.end(), src) != names.end()) {
        cfg.graph = builtin_graph(src);
      } else {
        cfg.graph = parse_graph(read_file(resolve(base_dir, src), "graph"));
      }
      cfg.graph_source = src;
    } else if (g.is_object()) {
      cfg.graph = parse_graph(g.dump());
      cfg.graph_source = "inline";
    } else {
      field_error("graph", "expected a builtin name, file path or graph object");
    }
  } catch (const GraphError& e) {
    field_error("graph", e.what());
  }

  if (!doc.contains("initial_tokens")) field_error("initial_tokens", "required");
  const auto& tokens = doc["initial_tokens"];
  if (!tokens.is_object()) field_error("initial_tokens", "expected an object vertex -> token");
  for (const auto& [key, value] : tokens.items()) {
    const std::string field = "initial_tokens." + key;
    const VertexId v = get_vertex(key, field);
    std::string label;
    if (value.is_string()) {
      label = value.get<std::string>();
    } else if (value.is_number_integer()) {
      label = value.dump();
    } else {
      field_error(field, "expected a string or integer token");
    }
    if (label.empty()) field_error(field, "empty token label");
    cfg.initial_tokens.emplace_back(v, std::move(label));
  }

  if (doc.contains("token_alphabet")) {
    const auto& a = doc["token_alphabet"];
    if (!a.is_array()) field_error("token_alphabet", "expected an array of strings");
    for (const auto& t : a) cfg.token_alphabet.push_back(get_string(t, "token_alphabet"));
  }

  if (doc.contains("rounds")) {
    const auto r = get_count(doc["rounds"], "rounds", 0);
    if (r > 1'000'000) field_error("rounds", "too large");
    cfg.rounds = static_cast<std::uint32_t>(r);
  }
  if (doc.contains("mode")) {
    const auto& m = get_string(doc["mode"], "mode");
    if (m == "measured") {
      cfg.mode = RoundMode::Measured;
    } else if (m == "coherent") {
      cfg.mode = RoundMode::Coherent;
    } else {
      field_error("mode", "expected \"measured\" or \"coherent\", got \"" + m + "\"");
    }
  }
  if (doc.contains("rule")) {
    const auto& r = doc["rule"];
    if (r.is_string()) {
      const auto& s = r.get_ref<const std::string&>();
      if (s == "full_swap") {
        cfg.rule = RuleKind::FullSwap;
      } else if (s == "directed_qutrit") {
        cfg.rule = RuleKind::DirectedQutrit;
      } else {
        field_error("rule", "expected \"full_swap\", \"directed_qutrit\" or {\"matrix_file\": path}");
      }
    } else if (r.is_object() && r.size() == 1 && r.contains("matrix_file")) {
      cfg.rule = RuleKind::Matrix;
      cfg.matrix_source = get_string(r["matrix_file"], "rule.matrix_file");
      try {
        cfg.matrix = parse_matrix_json(read_file(resolve(base_dir, cfg.matrix_source), "rule.matrix_file"));
      } catch (const ConfigError& e) {
        field_error("rule.matrix_file", e.what());
      }
    } else {
      field_error("rule", "expected \"full_swap\", \"directed_qutrit\" or {\"matrix_file\": path}");
    }
  }
  if (doc.contains("seed")) cfg.seed = get_count(doc["seed"], "seed", 0);
  if (doc.contains("engine")) {
    const auto& e = get_string(doc["engine"], "engine");
    if (e == "quantum") {
      cfg.engine = EngineChoice::Quantum;
    } else if (e == "classical") {
      cfg.engine = EngineChoice::Classical;
    } else if (e == "both") {
      cfg.engine = EngineChoice::Both;
    } else {
      field_error("engine", "expected \"quantum\", \"classical\" or \"both\", got \"" + e + "\"");
    }
  }
  if (doc.contains("samples")) cfg.samples = get_count(doc["samples"], "samples", 1);
  if (doc.contains("classical_method")) {
    const auto& m = get_string(doc["classical_method"], "classical_method");
    if (m == "auto") {
      cfg.classical_method = ClassicalMethod::Auto;
    } else if (m == "exact") {
      cfg.classical_method = ClassicalMethod::Exact;
    } else if (m == "sampling") {
      cfg.classical_method = ClassicalMethod::Sampling;
    } else {
      field_error("classical_method", "expected \"auto\", \"exact\" or \"sampling\"");
    }
  }
  if (doc.contains("quantum_trials"))
    cfg.quantum_trials = get_count(doc["quantum_trials"], "quantum_trials", 1);
  if (doc.contains("pre_swaps")) {
    const auto& s = doc["pre_swaps"];
    if (!s.is_array()) field_error("pre_swaps", "expected an array of vertex pairs");
    for (const auto& p : s) {
      if (!p.is_array() || p.size() != 2) field_error("pre_swaps", "expected [u, v] pairs");
      cfg.pre_swaps.emplace_back(get_vertex(get_string(p[0], "pre_swaps"), "pre_swaps"),
                                 get_vertex(get_string(p[1], "pre_swaps"), "pre_swaps"));
    }
  }
  if (doc.contains("skip_quiescent")) {
    if (!doc["skip_quiescent"].is_boolean()) field_error("skip_quiescent", "expected a boolean");
    cfg.skip_quiescent = doc["skip_quiescent"].get<bool>();
  }
  validate(cfg);
  return cfg;
}

std::vector<std::string> resolved_alphabet(const ScenarioConfig& cfg) {
  std::vector<std::string> alphabet = cfg.token_alphabet;
  if (alphabet.empty()) {
    for (const auto& [v, label] : cfg.initial_tokens)
      if (std::find(alphabet.begin(), alphabet.end(), label) == alphabet.end())
        alphabet.push_back(label);
  }
  std::size_t dim = alphabet.size();
  if (cfg.rule == RuleKind::DirectedQutrit) dim = 3;
  if (cfg.rule == RuleKind::Matrix) {
    dim = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(cfg.matrix.rows()))));
  }
  return padded_alphabet(std::move(alphabet), dim);
}

void validate(const ScenarioConfig& cfg) {
  if (cfg.graph.vertex_count() == 0) field_error("graph", "empty graph");
  std::set<VertexId> seen;
  for (const auto& [v, label] : cfg.initial_tokens) {
    if (!cfg.graph.contains(v)) field_error("initial_tokens." + v.str(), "not a vertex of the graph");
    if (!seen.insert(v).second) field_error("initial_tokens." + v.str(), "given twice");
  }
  for (const auto& v : cfg.graph.vertices())
    if (!seen.count(v)) field_error("initial_tokens", "no token for vertex '" + v.str() + "'");

  if (!cfg.token_alphabet.empty()) {
    std::set<std::string> labels(cfg.token_alphabet.begin(), cfg.token_alphabet.end());
    if (labels.size() != cfg.token_alphabet.size()) field_error("token_alphabet", "duplicate label");
    for (const auto& [v, label] : cfg.initial_tokens)
      if (!labels.count(label))
        field_error("initial_tokens." + v.str(), "token '" + label + "' not in token_alphabet");
  }
  std::size_t labels = cfg.token_alphabet.size();
  if (labels == 0) {
    std::set<std::string> distinct;
    for (const auto& [v, label] : cfg.initial_tokens) distinct.insert(label);
    labels = distinct.size();
  }
  switch (cfg.rule) {
    case RuleKind::FullSwap:
      if (labels > RegisterSpace::kMaxDimension) field_error("token_alphabet", "too many tokens");
      break;
    case RuleKind::DirectedQutrit:
      if (labels > 3) field_error("rule", "directed_qutrit takes at most 3 token labels");
      break;
    case RuleKind::Matrix: {
      const std::size_t n = cfg.matrix.rows();
      const auto d = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(n))));
      if (!cfg.matrix.is_square() || d * d != n || d < 1)
        field_error("rule.matrix_file", "matrix must be d^2 x d^2");
      if (labels > d)
        field_error("rule.matrix_file", "token dimension " + std::to_string(d) + " is smaller than " +
                                            std::to_string(labels) + " token labels");
      try {
        const auto rule = ExchangeRule::custom(cfg.matrix, cfg.matrix_source);
        if (cfg.engine != EngineChoice::Quantum && !rule.is_basis_permutation())
          field_error("engine", "the classical engine needs a basis-permutation rule");
      } catch (const EngineError& e) {
        field_error("rule.matrix_file", e.what());
      }
      break;
    }
  }
  if (cfg.mode == RoundMode::Coherent && cfg.rounds > RunOptions{}.coherent_round_cap)
    field_error("rounds", "coherent mode allows at most " +
                              std::to_string(RunOptions{}.coherent_round_cap) + " rounds");
  if (cfg.classical_method == ClassicalMethod::Exact && cfg.rounds > kMaxExactRounds &&
      cfg.engine != EngineChoice::Quantum)
    field_error("classical_method", "exact enumeration allows at most " +
                                        std::to_string(kMaxExactRounds) + " rounds");
  for (const auto& [a, b] : cfg.pre_swaps) {
    if (!cfg.graph.contains(a)) field_error("pre_swaps", "unknown vertex '" + a.str() + "'");
    if (!cfg.graph.contains(b)) field_error("pre_swaps", "unknown vertex '" + b.str() + "'");
  }
  if (cfg.samples == 0) field_error("samples", "must be positive");
  if (cfg.quantum_trials == 0) field_error("quantum_trials", "must be positive");
}

ordered_json run_scenario(const ScenarioConfig& cfg, const ReportOptions& options) {
  validate(cfg);
  const auto total_start = Clock::now();
  const auto alphabet = resolved_alphabet(cfg);
  const ExchangeRule rule = make_rule(cfg, alphabet.size());
  const TokenAssignment tokens = token_indices(cfg, alphabet);

  Rng root(cfg.seed);
  Rng quantum_stream = root.split();
  const std::uint64_t classical_seed = root.next();

  ordered_json report;
  report["scenario"] = cfg.name;
  report["seed"] = cfg.seed;
  report["config"] = config_json(cfg, alphabet);
  report["engines"] = ordered_json::object();

  std::optional<QuantumOutcome> quantum;
  std::optional<ClassicalOutcome> classical;
  double quantum_ms = 0.0;
  double classical_ms = 0.0;

  auto check_sums = [&](const std::map<VertexId, TokenDistribution>& m, const char* engine) {
    for (const auto& v : cfg.graph.vertices()) {
      double s = 0.0;
      if (auto it = m.find(v); it != m.end())
        for (const auto& [t, p] : it->second) s += p;
      if (std::abs(s - 1.0) > 1e-9)
        throw InvariantViolation(std::string(engine) + " marginal at '" + v.str() + "' sums to " +
                                 fmt::format("{:.17g}", s));
    }
  };

  if (cfg.engine != EngineChoice::Classical) {
    const auto start = Clock::now();
    quantum = run_quantum(cfg, tokens, rule, quantum_stream);
    quantum_ms = elapsed_ms(start);
    check_sums(quantum->marginals, "quantum");
    ordered_json q;
    q["mode"] = std::string(to_string(cfg.mode));
    q["trials"] = cfg.mode == RoundMode::Coherent ? 1 : cfg.quantum_trials;
    q["marginals"] = marginals_json(cfg.graph, quantum->marginals, alphabet);
    if (cfg.mode == RoundMode::Measured) {
      q["matchings"] = matchings_json(quantum->first_log);
    } else {
      q["matchings"] = nullptr;
    }
    q["support_size"] = quantum->support_size;
    q["max_support_size"] = quantum->max_support_size;
    ordered_json quiet = ordered_json::array();
    for (const auto& v : quantum->quiescent) quiet.push_back(v.str());
    q["quiescent_vertices"] = std::move(quiet);
    report["engines"]["quantum"] = std::move(q);
  }

  if (cfg.engine != EngineChoice::Quantum) {
    TokenAssignment shifted = tokens;
    apply_pre_swaps(cfg, shifted);
    const auto start = Clock::now();
    classical = run_classical(cfg, shifted, rule, classical_seed);
    classical_ms = elapsed_ms(start);
    check_sums(classical->marginals, "classical");
    ordered_json c;
    c["method"] = classical->method;
    if (classical->method == "sampling") {
      c["samples"] = cfg.samples;
    } else {
      c["samples"] = nullptr;
    }
    c["marginals"] = marginals_json(cfg.graph, classical->marginals, alphabet,
                                    classical->exact ? &*classical->exact : nullptr);
    report["engines"]["classical"] = std::move(c);
  }

  if (quantum && classical) {
    auto agreement = agreement_json(cfg, *quantum, *classical, alphabet.size());
    if (agreement["method"] == "exact" && !agreement["within"].get<bool>()) {
      throw InvariantViolation("quantum and exact classical marginals differ by " +
                               agreement["max_abs_diff"].dump());
    }
    report["agreement"] = std::move(agreement);
  } else {
    report["agreement"] = nullptr;
  }

  ordered_json edges = edge_probabilities_json(cfg.graph);
  for (std::size_t e = 0; e < edges.size(); ++e) {
    if (quantum && quantum->flag_pair[e]) {
      edges[e]["quantum"] = round12(*quantum->flag_pair[e]);
    } else {
      edges[e]["quantum"] = nullptr;
    }
  }
  report["edge_probabilities"] = std::move(edges);
  report["bound_check"] = bound_check_json(check_probability_bound(cfg.graph));

  if (options.timing) {
    ordered_json t;
    t["quantum"] = quantum ? ordered_json(quantum_ms) : ordered_json(nullptr);
    t["classical"] = classical ? ordered_json(classical_ms) : ordered_json(nullptr);
    t["total"] = elapsed_ms(total_start);
    report["timing_ms"] = std::move(t);
  } else {
    report["timing_ms"] = nullptr;
  }
  return report;
}

}  // namespace qdiffuse
