#include "seasonal_dispersal/cli.hpp"
#include "seasonal_dispersal/config.hpp"
#include "seasonal_dispersal/errors.hpp"
#include "seasonal_dispersal/io.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace sdisp;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json minimal_doc() {
  return json::parse(R"({
    "grid": {"x_min": -10, "x_max": 10, "n": 101, "boundary": "periodic_wrap"},
    "kernel": {"gamma": 1.0},
    "season": {"omega": 2, "rho": 0.5, "delta": 0.5},
    "growth": {"b": 1.0}
  })");
}

// Fresh scratch directory per test case.
fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("sdisp_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

fs::path write_doc(const fs::path& dir, const json& doc, const std::string& name = "cfg.json") {
  const fs::path p = dir / name;
  std::ofstream(p) << doc.dump(2);
  return p;
}

std::vector<std::string> collect_errors(const json& doc, const fs::path& base = ".") {
  try {
    parse_config(doc, base);
  } catch (const ConfigError& e) {
    return e.errors();
  }
  return {};
}

bool mentions(const std::vector<std::string>& errors, const std::string& needle) {
  for (const auto& e : errors)
    if (e.find(needle) != std::string::npos) return true;
  return false;
}

struct Run {
  int code;
  std::string out, err;
};

Run run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = dispatch(args, out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("minimal config gets every default") {
  const auto cfg = parse_config(minimal_doc());
  CHECK(cfg.problem.grid.n == 101);
  CHECK(cfg.problem.grid.boundary == BoundaryMode::periodic_wrap);
  CHECK(cfg.problem.kernel.family == KernelFamily::tent);
  CHECK(cfg.problem.op.d == 1.0);
  CHECK(cfg.problem.growth.c_sat == 1.0);
  CHECK(cfg.solver.periodic_tol == 1e-8);
  CHECK(cfg.solver.periods == 300);
  CHECK(cfg.seed.kind == SeedSpec::Kind::gaussian);
  CHECK(cfg.echo.at("operator").at("d") == 1.0);
  CHECK(cfg.echo.at("solver").contains("max_sweeps"));
}

TEST_CASE("season rho outside (0,1) is reported verbatim") {
  auto doc = minimal_doc();
  doc["season"]["rho"] = 1.2;
  const auto errors = collect_errors(doc);
  CHECK(mentions(errors, "season.rho must lie in (0,1)"));
}

TEST_CASE("unresolved kernel is a hypothesis violation") {
  auto doc = minimal_doc();
  doc["kernel"]["gamma"] = 0.1;
  try {
    parse_config(doc);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.hypothesis_violation());
    CHECK(mentions(e.errors(), "kernel unresolved by grid"));
  }
}

TEST_CASE("all errors are reported together") {
  auto doc = minimal_doc();
  doc["grid"]["extra"] = 1;
  doc["season"]["rho"] = 1.2;
  doc["season"]["delta"] = -1;
  doc["bogus"] = true;
  try {
    parse_config(doc);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.errors().size() >= 4);
    CHECK(mentions(e.errors(), "grid.extra"));
    CHECK(mentions(e.errors(), "bogus"));
    CHECK(mentions(e.errors(), "season.rho"));
    CHECK(mentions(e.errors(), "season.delta"));
    CHECK_FALSE(e.hypothesis_violation());
  }
  auto missing = minimal_doc();
  missing.erase("growth");
  CHECK(mentions(collect_errors(missing), "growth"));
}

TEST_CASE("table paths are resolved and checked") {
  const fs::path dir = scratch("tables");
  auto doc = minimal_doc();
  doc["growth"]["b"] = {{"kind", "table"}, {"path", "b.csv"}};
  CHECK(mentions(collect_errors(doc, dir), "b.csv"));

  std::ofstream(dir / "b.csv") << "# x, b\nx,b\n-10,0.5\n0,1.5\n10,0.5\n";
  const auto cfg = load_config(write_doc(dir, doc));
  CHECK(cfg.problem.growth.b(0.0) == doctest::Approx(1.5));
  CHECK(cfg.problem.growth.b(5.0) == doctest::Approx(1.0));

  const auto rows = read_numeric_table(dir / "b.csv");
  REQUIRE(rows.size() == 3);
  CHECK(rows[1] == std::vector<double>{0.0, 1.5});
}

TEST_CASE("JSON syntax errors carry a position") {
  try {
    parse_config_text("{\n  \"grid\": {,\n}");
    FAIL("expected rejection");
  } catch (const InvalidArgument& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
}

TEST_CASE("CSV formatting") {
  CHECK(format_real(0.1) == "0.10000000000000001");
  CHECK(format_real(1.0) == "1");
  CHECK(std::stod(format_real(2.0 / 3.0)) == 2.0 / 3.0);
  CHECK(format_real(NAN) == "nan");
  CHECK(format_real(-INFINITY) == "-inf");

  CsvTable t{{"x", "label", "k"}, {{0.5, std::string("a,b"), 3LL}}};
  CHECK(to_csv(t) == "x,label,k\n0.5,\"a,b\",3\n");
  CHECK(to_csv(CsvTable{{"a", "b"}, {}}) == "a,b\n");
  t.rows.push_back({1.0});
  CHECK_THROWS_AS(to_csv(t), InvalidArgument);
}

TEST_CASE("digests") {
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  const fs::path dir = scratch("digest");
  const CsvTable t{{"x"}, {{1.0}, {2.0}}};
  const auto d1 = write_csv(t, dir / "a.csv");
  const auto d2 = write_csv(t, dir / "b.csv");
  CHECK(d1 == d2);
  CHECK(file_sha256(dir / "a.csv") == d1);
}

TEST_CASE("manifest round trip") {
  const fs::path dir = scratch("manifest");
  RunManifest m("eigen", minimal_doc());
  const auto digest = write_text("hello\n", dir / "out.txt");
  m.add_file(dir / "out.txt", digest);
  m.mark_stage("solve");
  m.summary()["lambda_p"] = -1.0;
  m.write(dir / "out.manifest.json");
  const json doc = json::parse(std::ifstream(dir / "out.manifest.json"));
  CHECK(doc.at("version") == artifact_version());
  CHECK(doc.at("stages").size() == 1);
  CHECK(doc.at("config").at("grid").at("n") == 101);
  CHECK(verify_manifest(dir / "out.manifest.json").ok);
  std::ofstream(dir / "out.txt") << "tampered\n";
  const auto check = verify_manifest(dir / "out.manifest.json");
  CHECK_FALSE(check.ok);
  CHECK(check.mismatches.size() == 1);
}

TEST_CASE("command line exit codes") {
  const fs::path dir = scratch("cli");
  CHECK(run({}).code == kExitUsage);
  CHECK(run({"frobnicate"}).code == kExitUsage);
  CHECK(run({"eigen", "--config", (dir / "missing.json").string()}).code == kExitUsage);

  const auto cfg = write_doc(dir, minimal_doc());
  const auto eigen = run({"eigen", "--config", cfg.string(), "--out", (dir / "e.csv").string()});
  CHECK(eigen.code == kExitOk);
  CHECK(fs::exists(dir / "e.csv"));
  CHECK(verify_manifest(dir / "e.csv.manifest.json").ok);
  std::ifstream csv(dir / "e.csv");
  std::string header, row;
  std::getline(csv, header);
  std::getline(csv, row);
  CHECK(header == "R,lambda_p,lambda_p_omega,residual,iterations,bound_lo,bound_hi");
  CHECK(row.rfind("domain,-1", 0) == 0);

  auto ext = minimal_doc();
  ext["season"]["delta"] = 2.0;
  const auto ext_cfg = write_doc(dir, ext, "ext.json");
  const auto periodic =
      run({"periodic", "--config", ext_cfg.string(), "--out", (dir / "p.csv").string()});
  CHECK(periodic.code == kExitNumerical);
  CHECK(periodic.err.find("extinction regime") != std::string::npos);

  auto coarse = minimal_doc();
  coarse["kernel"]["gamma"] = 0.1;
  const auto coarse_cfg = write_doc(dir, coarse, "coarse.json");
  CHECK(run({"eigen", "--config", coarse_cfg.string(), "--out", (dir / "c.csv").string()}).code ==
        kExitHypothesis);
  CHECK(run({"eigen", "--config", cfg.string()}).code == kExitUsage);  // --out is required
}

TEST_CASE("simulate writes period-end snapshots") {
  const fs::path dir = scratch("simulate");
  const auto cfg = write_doc(dir, minimal_doc());
  const auto r = run({"simulate", "--config", cfg.string(), "--periods", "3", "--out",
                      (dir / "s.csv").string()});
  REQUIRE(r.code == kExitOk);
  std::ifstream csv(dir / "s.csv");
  std::string line;
  std::getline(csv, line);
  CHECK(line == "t,season,node_index,x,u");
  std::size_t rows = 0;
  while (std::getline(csv, line)) ++rows;
  CHECK(rows == 4 * 101);
}

TEST_CASE("identical runs produce byte-identical data") {
  const fs::path dir = scratch("determinism");
  const auto cfg = write_doc(dir, minimal_doc());
  for (const char* name : {"a.csv", "b.csv"})
    REQUIRE(run({"sweep", "--config", cfg.string(), "--delta", "0.3,2", "--rho", "0.4,0.6",
                 "--periods", "60", "--out", (dir / name).string()})
                .code == kExitOk);
  CHECK(file_sha256(dir / "a.csv") == file_sha256(dir / "b.csv"));
  const json manifest = json::parse(std::ifstream(dir / "a.csv.manifest.json"));
  CHECK(manifest.at("files").at(0).at("sha256") == file_sha256(dir / "a.csv"));
}
