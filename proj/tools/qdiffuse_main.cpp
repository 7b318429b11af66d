// qdiffuse: run diffusion scenarios and graph analyses from the command line.
//
//   qdiffuse run a.json b.json      reports in input order
//   qdiffuse builtin paper-4node
//   qdiffuse analyze graph.json
//   qdiffuse fixed-point 3
//
// Exit codes: 0 ok, 1 config error, 2 engine error, 3 invariant violation.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "qdiffuse/errors.hpp"
#include "qdiffuse/graph.hpp"
#include "qdiffuse/report.hpp"
#include "qdiffuse/scenario.hpp"

namespace {

using namespace qdiffuse;

struct Globals {
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> samples;
  std::string format = "json";
  bool timing = false;
  unsigned jobs = 0;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int exit_code_for(const std::exception_ptr& err) {
  try {
    std::rethrow_exception(err);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const InvariantViolation& e) {
    std::cerr << "invariant violation: " << e.what() << "\n";
    return 3;
  } catch (const EngineError& e) {
    std::cerr << "engine error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

void apply_overrides(ScenarioConfig& cfg, const Globals& g) {
  if (g.seed) cfg.seed = *g.seed;
  if (g.samples) cfg.samples = *g.samples;
  validate(cfg);
}

std::string render_report(const nlohmann::ordered_json& report, const Globals& g) {
  return g.format == "csv" ? render_marginals_csv(report) : render_json(report);
}

/// Runs every config, one worker per job, and prints in input order. The
/// first failure in input order decides the exit code.
int run_batch(const std::vector<std::string>& paths, const Globals& g) {
  std::vector<std::optional<nlohmann::ordered_json>> reports(paths.size());
  std::vector<std::exception_ptr> errors(paths.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < paths.size();) {
      try {
        const std::filesystem::path path(paths[i]);
        ScenarioConfig cfg = parse_scenario(slurp(paths[i]), path.parent_path());
        apply_overrides(cfg, g);
        reports[i] = run_scenario(cfg, ReportOptions{g.timing});
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  unsigned jobs = g.jobs ? g.jobs : std::max(1u, std::thread::hardware_concurrency());
  jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, paths.size()));
  std::vector<std::thread> pool;
  for (unsigned j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  for (std::size_t i = 0; i < paths.size(); ++i) {
    if (errors[i]) {
      std::cerr << paths[i] << ": ";
      return exit_code_for(errors[i]);
    }
  }
  if (g.format == "csv") {
    for (std::size_t i = 0; i < reports.size(); ++i) {
      if (i) std::cout << "\n";
      std::cout << render_marginals_csv(*reports[i]);
    }
  } else if (reports.size() == 1) {
    std::cout << render_json(*reports[0]);
  } else {
    nlohmann::ordered_json all = nlohmann::ordered_json::array();
    for (auto& r : reports) all.push_back(std::move(*r));
    std::cout << render_json(all);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-walker quantum state diffusion simulator"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--seed", g.seed, "Override the scenario seed");
  app.add_option("--samples", g.samples, "Classical sampling trajectories")
      ->check(CLI::PositiveNumber);
  app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
  app.add_flag("--timing", g.timing, "Include wall-clock timings in reports");
  app.add_option("--jobs", g.jobs, "Worker threads for a batch (0 = all cores)");

  std::vector<std::string> configs;
  auto* run = app.add_subcommand("run", "Run scenario config files");
  run->add_option("configs", configs, "Scenario JSON files")->required();

  std::string builtin_name;
  auto* builtin = app.add_subcommand("builtin", "Run a built-in scenario");
  std::string names;
  for (const auto& n : builtin_scenario_names()) names += (names.empty() ? "" : ", ") + n;
  builtin->add_option("name", builtin_name, names)->required();

  std::string graph_path;
  auto* analyze = app.add_subcommand("analyze", "Edge probabilities and bound report of a graph");
  analyze->add_option("graph", graph_path, "Graph JSON file")->required();

  std::uint32_t delta = 0;
  auto* fixed = app.add_subcommand("fixed-point", "Solve p = (1 - p)^(2 delta)");
  fixed->add_option("delta", delta, "Maximum degree")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*run) return run_batch(configs, g);
    if (*builtin) {
      ScenarioConfig cfg = builtin_scenario(builtin_name);
      apply_overrides(cfg, g);
      std::cout << render_report(run_scenario(cfg, ReportOptions{g.timing}), g);
      return 0;
    }
    if (*analyze) {
      const auto doc = analyze_graph(parse_graph(slurp(graph_path)));
      std::cout << (g.format == "csv" ? render_analysis_csv(doc) : render_json(doc));
      return 0;
    }
    if (*fixed) {
      const auto doc = fixed_point_json(delta);
      if (g.format == "csv") {
        std::cout << "delta,p,residual\n"
                  << fmt::format("{},{:.12g},{:.3g}\n", delta, doc["p"].get<double>(),
                                 doc["residual"].get<double>());
      } else {
        std::cout << render_json(doc);
      }
      return 0;
    }
  } catch (...) {
    return exit_code_for(std::current_exception());
  }
  return 0;
}
