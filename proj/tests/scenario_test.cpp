#include <doctest.h>

#include <string>

#include "qdiffuse/errors.hpp"
#include "qdiffuse/report.hpp"
#include "qdiffuse/scenario.hpp"

using namespace qdiffuse;
using nlohmann::ordered_json;

namespace {

std::string config_error(const std::string& text) {
  try {
    parse_scenario(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

bool starts_with(const std::string& s, const std::string& prefix) { return s.rfind(prefix, 0) == 0; }

const char* kInline = R"({
  "graph": {"vertices": ["A","B","C"], "edges": [["A","B"],["B","C"]]},
  "initial_tokens": {"A": "x", "B": "y", "C": "z"},
  "rounds": 1, "mode": "coherent", "seed": 9
})";

}  // namespace

TEST_CASE("builtin scenarios") {
  const auto four = builtin_scenario("paper-4node");
  CHECK(four.graph.vertex_count() == 4);
  CHECK(four.graph.edge_count() == 4);
  CHECK(four.graph.degree(VertexId("C")) == 3);
  const auto c15 = builtin_scenario("watrous-c15");
  CHECK(c15.graph.vertex_count() == 15);
  CHECK(c15.graph.edge_count() == 15);
  CHECK(c15.initial_tokens.front() == std::pair{VertexId("00"), std::string("1")});
  CHECK(c15.graph.connected_components().size() == 5);
  CHECK_THROWS_AS(builtin_scenario("unknown"), ConfigError);
  for (const auto& n : builtin_scenario_names()) CHECK_NOTHROW(validate(builtin_scenario(n)));
}

TEST_CASE("four node report") {
  const auto report = run_scenario(builtin_scenario("paper-4node"));
  const auto& qa = report["engines"]["quantum"]["marginals"]["A"];
  CHECK(qa["a"]["p"].get<double>() == doctest::Approx(7.0 / 12).epsilon(1e-12));
  CHECK(qa["d"]["p"].get<double>() == 0.0);
  const auto& ca = report["engines"]["classical"]["marginals"]["A"];
  CHECK(ca["a"]["exact"] == "7/12");
  CHECK(ca["b"]["exact"] == "1/4");
  CHECK(ca["c"]["exact"] == "1/6");
  CHECK(ca["d"]["exact"] == "0");
  CHECK(report["agreement"]["within"] == true);
  CHECK(report["timing_ms"].is_null());
  std::vector<std::string> keys;
  for (const auto& [k, v] : report.items()) keys.push_back(k);
  CHECK(keys == std::vector<std::string>{"scenario", "seed", "config", "engines", "agreement",
                                         "edge_probabilities", "bound_check", "timing_ms"});
}

TEST_CASE("watrous report") {
  const auto report = run_scenario(builtin_scenario("watrous-c15"));
  const auto& q = report["engines"]["quantum"];
  CHECK(q["marginals"]["12"]["1"]["p"].get<double>() == doctest::Approx(0.5));
  CHECK(q["marginals"]["13"]["1"]["p"].get<double>() == doctest::Approx(0.25));
  CHECK(q["marginals"]["14"]["1"]["p"].get<double>() == doctest::Approx(0.25));
  CHECK(q["quiescent_vertices"].size() == 12);
  CHECK(q["marginals"]["00"]["0"]["p"].get<double>() == 1.0);
}

TEST_CASE("zero rounds reproduce the initial tokens") {
  auto cfg = builtin_scenario("paper-4node");
  cfg.rounds = 0;
  const auto report = run_scenario(cfg);
  for (const char* engine : {"quantum", "classical"}) {
    const auto& m = report["engines"][engine]["marginals"];
    CHECK(m["A"]["a"]["p"].get<double>() == 1.0);
    CHECK(m["D"]["d"]["p"].get<double>() == 1.0);
  }
}

TEST_CASE("reports are deterministic") {
  for (const auto& name : builtin_scenario_names()) {
    auto cfg = builtin_scenario(name);
    cfg.mode = RoundMode::Measured;
    cfg.rounds = 2;
    cfg.seed = 77;
    cfg.classical_method = ClassicalMethod::Sampling;
    cfg.samples = 2000;
    CHECK(render_json(run_scenario(cfg)) == render_json(run_scenario(cfg)));
  }
}

TEST_CASE("measured trials agree statistically") {
  auto cfg = builtin_scenario("paper-4node");
  cfg.mode = RoundMode::Measured;
  cfg.rounds = 2;
  cfg.quantum_trials = 4000;
  cfg.seed = 3;
  const auto report = run_scenario(cfg);
  CHECK(report["agreement"]["method"] == "statistical");
  CHECK(report["engines"]["quantum"]["matchings"].size() == 2);
}

TEST_CASE("inline scenario") {
  const auto cfg = parse_scenario(kInline);
  CHECK(cfg.graph_source == "inline");
  CHECK(resolved_alphabet(cfg) == std::vector<std::string>{"x", "y", "z"});
  const auto report = run_scenario(cfg);
  CHECK(report["seed"] == 9);
  CHECK(report["engines"]["classical"]["method"] == "exact");
}

TEST_CASE("alphabets") {
  auto cfg = parse_scenario(R"({"graph": "single-edge", "initial_tokens": {"A": "1", "B": "2"},
                               "rule": "directed_qutrit", "token_alphabet": ["0","1","2"]})");
  CHECK(resolved_alphabet(cfg).size() == 3);
  cfg = parse_scenario(R"({"graph": "single-edge", "initial_tokens": {"A": 5, "B": 5},
                          "rule": "directed_qutrit"})");
  CHECK(resolved_alphabet(cfg) == std::vector<std::string>{"5", "1", "2"});
}

TEST_CASE("field level config errors") {
  CHECK(starts_with(config_error("{"), "scenario"));
  CHECK(starts_with(config_error(R"({"initial_tokens": {}})"), "graph"));
  CHECK(starts_with(config_error(R"({"graph": "single-edge", "initial_tokens": {"A": "a"}})"),
                    "initial_tokens"));
  CHECK(starts_with(config_error(R"({"graph": "single-edge", "initial_tokens": {"A": "a", "B": "b"}, "mode": "x"})"),
                    "mode"));
  CHECK(starts_with(config_error(R"({"graph": "single-edge", "initial_tokens": {"A": "a", "B": "b"}, "mode": "coherent", "rounds": 4})"),
                    "rounds"));
  CHECK(starts_with(config_error(R"({"graph": "single-edge", "initial_tokens": {"A": "a", "B": "b"}, "rounds": -1})"),
                    "rounds"));
  CHECK(starts_with(config_error(R"({"graph": "single-edge", "initial_tokens": {"A": "a", "B": "b"}, "samples": 0})"),
                    "samples"));
  CHECK(starts_with(config_error(R"({"graph": "single-edge", "initial_tokens": {"A": "a", "B": "b"}, "colour": 1})"),
                    "colour"));
  CHECK(starts_with(config_error(R"({"graph": "single-edge", "initial_tokens": {"A": "a", "B": "b"}, "engine": "gpu"})"),
                    "engine"));
  CHECK(starts_with(config_error(R"({"graph": "single-edge", "initial_tokens": {"A": "a", "B": "b"}, "rule": "half_swap"})"),
                    "rule"));
  CHECK(starts_with(config_error(R"({"graph": "single-edge", "initial_tokens": {"A": "a", "B": "b", "Q": "c"}})"),
                    "initial_tokens.Q"));
  CHECK(starts_with(config_error(R"({"graph": "missing-file.json", "initial_tokens": {}})"), "graph"));
  CHECK(starts_with(config_error(R"({"graph": {"vertices": ["A"], "edges": [["A","A"]]}, "initial_tokens": {"A": "a"}})"),
                    "graph"));
  CHECK(starts_with(config_error(R"({"graph": "single-edge", "initial_tokens": {"A": "1", "B": "2"}, "rule": "directed_qutrit", "token_alphabet": ["0","1"]})"),
                    "initial_tokens.B"));
  CHECK(starts_with(config_error(R"({"graph": "single-edge", "initial_tokens": {"A": "a", "B": "b"}, "pre_swaps": [["A","Z"]]})"),
                    "pre_swaps"));
}

TEST_CASE("csv rendering") {
  const auto csv = render_marginals_csv(run_scenario(builtin_scenario("single-edge")));
  CHECK(starts_with(csv, "engine,vertex,token,p,exact\n"));
  CHECK(csv.find("quantum,A,b,1,\n") != std::string::npos);
  CHECK(csv.find("classical,A,b,1,1\n") != std::string::npos);
  const auto analysis = analyze_graph(builtin_graph("paper-4node"));
  const auto acsv = render_analysis_csv(analysis);
  CHECK(acsv.find("A,B,0.25,1/4,1/4,25/36,true\n") != std::string::npos);
  CHECK(analysis["profile_count"] == 12);
}
