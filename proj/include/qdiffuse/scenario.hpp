#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "qdiffuse/complex_matrix.hpp"
#include "qdiffuse/diffusion.hpp"
#include "qdiffuse/graph.hpp"

namespace qdiffuse {

enum class EngineChoice { Quantum, Classical, Both };
enum class ClassicalMethod { Auto, Exact, Sampling };
enum class RuleKind { FullSwap, DirectedQutrit, Matrix };

struct ScenarioConfig {
  std::string name = "scenario";
  /// Builtin graph name, file path, or "inline".
  std::string graph_source;
  OrientedGraph graph;
  /// Token label per vertex, in document order.
  std::vector<std::pair<VertexId, std::string>> initial_tokens;
  /// Token labels in basis-index order. Empty means first-appearance order.
  std::vector<std::string> token_alphabet;
  std::uint32_t rounds = 1;
  RoundMode mode = RoundMode::Measured;
  RuleKind rule = RuleKind::FullSwap;
  std::string matrix_source;
  DenseMatrix matrix;
  std::uint64_t seed = 0;
  EngineChoice engine = EngineChoice::Both;
  std::uint64_t samples = 100000;
  ClassicalMethod classical_method = ClassicalMethod::Auto;
  /// Independent quantum trajectories to average (Measured mode).
  std::uint64_t quantum_trials = 1;
  /// Token swaps applied before the first round.
  std::vector<std::pair<VertexId, VertexId>> pre_swaps;
  bool skip_quiescent = false;
};

/// Parses a scenario document; relative graph and matrix paths resolve
/// against `base_dir`. Throws ConfigError with the offending field named.
ScenarioConfig parse_scenario(std::string_view json_text, const std::filesystem::path& base_dir = {});

/// "paper-4node", "watrous-c15", "triangle" or "single-edge".
ScenarioConfig builtin_scenario(std::string_view name);
const std::vector<std::string>& builtin_scenario_names();
/// The graph of a builtin scenario; throws ConfigError for unknown names.
OrientedGraph builtin_graph(std::string_view name);

/// Throws ConfigError if the config is inconsistent.
void validate(const ScenarioConfig& cfg);

/// Token labels in basis-index order (explicit alphabet or first appearance).
std::vector<std::string> resolved_alphabet(const ScenarioConfig& cfg);

struct ReportOptions {
  /// Wall-clock timings make reports non-reproducible, so they are opt-in.
  bool timing = false;
};

/// Runs the configured engines and builds the report document.
nlohmann::ordered_json run_scenario(const ScenarioConfig& cfg, const ReportOptions& options = {});

}  // namespace qdiffuse
