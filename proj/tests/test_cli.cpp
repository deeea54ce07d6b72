#include <doctest.h>

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "pebblemark/stats.hpp"
#include "support/oracles.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CliRun {
  int rc = 0;
  std::string out;
  std::string err;
  json report;
};

CliRun cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  CliRun run;
  run.rc = pebblemark::cli::run(args, out, err);
  run.out = out.str();
  run.err = err.str();
  if (auto brace = run.out.find('{'); brace != std::string::npos) {
    run.report = json::parse(run.out.substr(brace), nullptr, false);
  }
  return run;
}

fs::path temp_dir() {
  fs::path dir = fs::temp_directory_path() / "pebblemark-cli-test";
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Minimal structural JSON-schema validator covering the subset the published
// schema uses: type, properties, required, items, enum.
bool validate_schema(const json& schema, const json& value) {
  if (schema.contains("type")) {
    const std::string type = schema["type"];
    if (type == "object" && !value.is_object()) return false;
    if (type == "array" && !value.is_array()) return false;
    if (type == "string" && !value.is_string()) return false;
    if (type == "integer" && !value.is_number_integer() && !value.is_number_unsigned()) return false;
    if (type == "number" && !value.is_number()) return false;
    if (type == "boolean" && !value.is_boolean()) return false;
  }
  if (schema.contains("enum")) {
    bool any = false;
    for (const auto& candidate : schema["enum"]) any = any || candidate == value;
    if (!any) return false;
  }
  if (schema.contains("required")) {
    for (const auto& key : schema["required"]) {
      if (!value.contains(key.get<std::string>())) return false;
    }
  }
  if (schema.contains("properties") && value.is_object()) {
    for (const auto& [key, sub] : schema["properties"].items()) {
      if (value.contains(key) && !validate_schema(sub, value[key])) return false;
    }
  }
  if (schema.contains("items") && value.is_array()) {
    for (const auto& item : value) {
      if (!validate_schema(schema["items"], item)) return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("graph build writes the documented format") {
  fs::path dir = temp_dir();
  fs::path out = dir / "l8.dag";
  CliRun run = cli({"graph", "build", "--family", "line", "--n", "8", "--seed", "00", "--out", out.string()});
  REQUIRE(run.rc == 0);
  CHECK(slurp(out).rfind("dag 8 1\n", 0) == 0);
  CHECK(run.report["graph_sha256"].is_string());
  CHECK(fs::exists(out.string() + ".manifest.json"));
}

TEST_CASE("usage errors exit with 2") {
  CliRun run = cli({"graph", "build", "--family", "line"});
  CHECK(run.rc == 2);
  CliRun unknown = cli({"frobnicate"});
  CHECK(unknown.rc == 2);
  CliRun badflag = cli({"graph", "build", "--family", "line", "--n", "4", "--out", "/tmp/x", "--bogus"});
  CHECK(badflag.rc == 2);
}

TEST_CASE("contract errors exit with 1") {
  fs::path dir = temp_dir();
  fs::path out = dir / "bad.dag";
  CliRun run = cli({"graph", "build", "--family", "superconc", "--n", "3", "--seed", "00", "--out",
                    out.string()});
  CHECK(run.rc == 1);
  CHECK(run.err.find("error:") != std::string::npos);
}

TEST_CASE("repro reproduces a build byte for byte") {
  fs::path dir = temp_dir();
  fs::path out = dir / "fig5-repro.dyn";
  fs::path manifest = dir / "fig5-repro.manifest.json";
  CliRun build = cli({"graph", "build", "--family", "fig5", "--n", "16", "--k", "4", "--eps", "0.5",
                      "--seed", "beef", "--out", out.string(), "--manifest", manifest.string()});
  REQUIRE(build.rc == 0);
  CliRun repro = cli({"repro", manifest.string()});
  CHECK(repro.rc == 0);
  CHECK(repro.report["pass"] == true);
}

TEST_CASE("repro detects tampering") {
  fs::path dir = temp_dir();
  fs::path out = dir / "tamper.dag";
  fs::path manifest = dir / "tamper.manifest.json";
  CliRun build = cli({"graph", "build", "--family", "line", "--n", "6", "--seed", "00", "--out",
                      out.string(), "--manifest", manifest.string()});
  REQUIRE(build.rc == 0);
  // flip the recorded output hash
  json m = json::parse(slurp(manifest));
  for (auto& [path, hash] : m["outputs"].items()) {
    std::string h = hash.get<std::string>();
    h[0] = h[0] == '0' ? '1' : '0';
    m["outputs"][path] = h;
  }
  std::ofstream(manifest) << m.dump(2);
  CliRun repro = cli({"repro", manifest.string()});
  CHECK(repro.rc == 1);
}

TEST_CASE("game report validates against the published schema") {
  fs::path dir = temp_dir();
  fs::path graph = dir / "f5-game.dyn";
  REQUIRE(cli({"graph", "build", "--family", "fig5", "--n", "16", "--k", "4", "--seed", "77", "--out",
               graph.string()})
              .rc == 0);
  CliRun run = cli({"game", "run", "--graph", graph.string(), "--attacker", "coin-flip", "--trials", "20",
                    "--mode", "single", "--evaluator", "full", "--seed", "99"});
  REQUIRE(run.rc == 0);
  json schema = json::parse(slurp(fs::path(SCHEMA_DIR) / "game-report.schema.json"));
  CHECK(validate_schema(schema, run.report));
}

TEST_CASE("mhf eval emits a trace and a test vector") {
  fs::path dir = temp_dir();
  fs::path graph = dir / "f5-eval.dyn";
  REQUIRE(cli({"graph", "build", "--family", "fig5", "--n", "16", "--k", "4", "--seed", "55", "--out",
               graph.string()})
              .rc == 0);
  fs::path trace = dir / "eval.trace";
  CliRun run = cli({"mhf", "eval", "--graph", graph.string(), "--input", "0011", "--coins", "22",
                    "--policy", "lru", "--trace", trace.string(), "--emit-output"});
  REQUIRE(run.rc == 0);
  CHECK(slurp(trace).rfind("trace v1 32 ", 0) == 0);
  std::string vec = run.report["vector"];
  CHECK(vec.rfind("vector v1 ", 0) == 0);
  std::istringstream parts(vec);
  std::string magic, version, ghash, x, coins, output;
  parts >> magic >> version >> ghash >> x >> coins >> output;
  CHECK(ghash == run.report["graph_sha256"]);
  CHECK(x == "0011");
  CHECK(output == run.report["output"]);
}

TEST_CASE("plot emits deterministic columns and a slope that matches a refit") {
  fs::path dir = temp_dir();
  std::vector<fs::path> reports;
  for (std::uint32_t n : {32u, 64u, 128u}) {
    fs::path graph = dir / ("curve-" + std::to_string(n) + ".dyn");
    REQUIRE(cli({"graph", "build", "--family", "fig5", "--n", std::to_string(n), "--k", "4", "--seed",
                 "11", "--out", graph.string()})
                .rc == 0);
    fs::path rep = dir / ("curve-" + std::to_string(n) + ".json");
    REQUIRE(cli({"pebble", "suite", "--graph", graph.string(), "--resolver", "keyed", "--seed", "ab",
                 "--strategies", "greedy-discard,generic-attack", "--json", rep.string()})
                .rc == 0);
    reports.push_back(rep);
  }
  fs::path out = dir / "curve.tsv";
  std::vector<std::string> args{"plot", "--kind", "cc-curve", "--out", out.string()};
  for (const auto& r : reports) {
    args.push_back("--in");
    args.push_back(r.string());
  }
  CliRun plot = cli(args);
  REQUIRE(plot.rc == 0);
  std::string text = slurp(out);
  REQUIRE(text.rfind("# loglog_slope ", 0) == 0);
  double tool_slope = std::stod(text.substr(15, text.find('\n') - 15));

  // refit from the emitted columns with the independent implementation
  std::istringstream lines(text);
  std::string line;
  std::map<std::uint64_t, std::uint64_t> best;
  while (std::getline(lines, line)) {
    if (line.empty() || line[0] == '#' || line[0] == 'n') continue;
    std::istringstream cells(line);
    std::uint64_t n, cc;
    std::string strategy;
    cells >> n >> strategy >> cc;
    auto it = best.find(n);
    if (it == best.end() || cc < it->second) best[n] = cc;
  }
  std::vector<double> xs, ys;
  for (auto [n, cc] : best) {
    xs.push_back(std::log2(static_cast<double>(n)));
    ys.push_back(std::log2(static_cast<double>(cc)));
  }
  double refit = pebblemark::testing::slope_oracle(xs, ys);
  CHECK(std::abs(refit - tool_slope) < 1e-9);
}

TEST_CASE("reports are deterministic given the seed") {
  fs::path dir = temp_dir();
  fs::path graph = dir / "det.dyn";
  REQUIRE(cli({"graph", "build", "--family", "fig5", "--n", "16", "--k", "4", "--seed", "31", "--out",
               graph.string()})
              .rc == 0);
  auto run = [&]() {
    return cli({"game", "run", "--graph", graph.string(), "--attacker", "exact-match", "--trials", "10",
                "--evaluator", "noshuffle", "--seed", "77"})
        .out;
  };
  CHECK(run() == run());
}
