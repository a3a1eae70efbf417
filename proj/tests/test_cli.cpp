#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include "sqv/config.hpp"

#ifndef SQVSIM_BINARY
#error "SQVSIM_BINARY must point at the sqvsim executable"
#endif

namespace fs = std::filesystem;

namespace {

struct CliResult {
  int code = -1;
  std::string out, err;
};

fs::path scratch(const char* name) {
  const fs::path d = fs::temp_directory_path() / "sqv_cli_tests" / name;
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

std::string first_line(const std::string& text) {
  return text.substr(0, text.find('\n'));
}

CliResult run_cli(const std::string& args, const fs::path& capture_dir) {
  const fs::path out = capture_dir / "stdout.txt";
  const fs::path err = capture_dir / "stderr.txt";
  const std::string cmd = std::string("'") + SQVSIM_BINARY + "' " + args + " >'" + out.string() +
                          "' 2>'" + err.string() + "'";
  const int rc = std::system(cmd.c_str());
  CliResult res;
  if (rc != -1 && WIFEXITED(rc)) res.code = WEXITSTATUS(rc);
  res.out = read_file(out);
  res.err = read_file(err);
  return res;
}

const char* kSpectrumConfig = R"json({
  "experiment": "spectrum",
  "lattice": {"omega0": 2.0, "half_width": 1.0, "n_points": 33},
  "gain": {"gamma": 1.0, "kappa": 1.0, "z": 1.0},
  "gate": {"duration": 8.0},
  "noise": {"p_sf": 0.5, "seed": 5, "n_realizations": 2000}
})json";

// deliberately broken unitarity: the squeeze convention taken literally is not
// norm-preserving at this operating point, so the diagonal equivalence
// verdict fails deterministically
const char* kFailingCorr2Config = R"json({
  "experiment": "corr2",
  "lattice": {"omega0": 2.0, "half_width": 0.5, "n_points": 65},
  "gain": {"gamma": 1.0, "kappa": 1.0, "z": 1.0, "convention": "paper_literal"},
  "gate": {"duration": 20.0},
  "noise": {"p_sf": 0.5, "seed": 11, "n_realizations": 100},
  "corr4": {"count": 16}
})json";

}  // namespace

TEST_CASE("usage errors exit 1 with a machine-parsable record") {
  const fs::path dir = scratch("usage");
  {
    const CliResult r = run_cli("", dir);
    CHECK(r.code == 1);
    CHECK(r.err.find("\"usage\"") != std::string::npos);
  }
  {
    const CliResult r = run_cli("'" + (dir / "missing.json").string() + "'", dir);
    CHECK(r.code == 1);
    CHECK(r.err.find("\"usage\"") != std::string::npos);
    CHECK(r.err.find("cannot open") != std::string::npos);
  }
  {
    const fs::path cfg = dir / "bad.json";
    write_file(cfg, R"({"lattice":{"n_points":256}})");
    const CliResult r = run_cli("'" + cfg.string() + "'", dir);
    CHECK(r.code == 1);
    CHECK(r.err.find("\"usage\"") != std::string::npos);
    CHECK(r.err.find("lattice.n_points") != std::string::npos);
  }
  {
    const fs::path cfg = dir / "ok.json";
    write_file(cfg, kSpectrumConfig);
    const CliResult r = run_cli("'" + cfg.string() + "' --workers 0", dir);
    CHECK(r.code == 1);
    const CliResult r2 = run_cli("'" + cfg.string() + "' --experiment warp", dir);
    CHECK(r2.code == 1);
    CHECK(r2.err.find("unknown experiment") != std::string::npos);
  }
}

TEST_CASE("--help exits 0") {
  const fs::path dir = scratch("help");
  const CliResult r = run_cli("--help", dir);
  CHECK(r.code == 0);
  CHECK(r.out.find("sqvsim") != std::string::npos);
}

TEST_CASE("a run produces self-identifying artifacts inside its output dir") {
  const fs::path dir = scratch("happy");
  const fs::path cfg = dir / "config_in.json";
  write_file(cfg, kSpectrumConfig);
  const fs::path out = dir / "run";
  const CliResult r =
      run_cli("'" + cfg.string() + "' --output-dir '" + out.string() + "'", dir);
  CHECK(r.code == 0);

  std::set<std::string> names;
  for (const auto& e : fs::directory_iterator(out)) names.insert(e.path().filename().string());
  CHECK(names == std::set<std::string>{"config.json", "report.json", "report.txt",
                                       "spectrum.csv"});

  // the embedded hash is the FNV-1a of the stored identity config
  const std::string identity = read_file(out / "config.json");
  REQUIRE(!identity.empty());
  REQUIRE(identity.back() == '\n');
  char want[17];
  std::snprintf(want, sizeof want, "%016llx",
                static_cast<unsigned long long>(
                    sqv::fnv1a64(identity.substr(0, identity.size() - 1))));
  const std::string csv = read_file(out / "spectrum.csv");
  CHECK(first_line(csv) == std::string("# sqvsim 0.1.0 config_hash=") + want);

  const std::string report = read_file(out / "report.json");
  CHECK(report.find("\"config_hash\": \"" + std::string(want) + "\"") != std::string::npos);
  CHECK(report.find("\"version\": \"0.1.0\"") != std::string::npos);
  CHECK(report.find("\"pass\": true") != std::string::npos);
  CHECK(read_file(out / "report.txt").find("verdict: PASS") != std::string::npos);

  // numbers carry full double precision (%.16e): 1 + 16 significant digits
  std::istringstream lines(csv);
  std::string skip, data;
  std::getline(lines, skip);  // comment
  std::getline(lines, skip);  // header
  std::getline(lines, data);  // first data row
  std::istringstream cells(data);
  std::string cell;
  int checked = 0;
  while (std::getline(cells, cell, ',')) {
    CHECK(cell.size() >= 20);
    CHECK(cell.find('e') != std::string::npos);
    const std::size_t dot = (!cell.empty() && cell[0] == '-') ? 2u : 1u;
    CHECK(cell.find('.') == dot);
    ++checked;
  }
  CHECK(checked == 5);
}

TEST_CASE("artifacts are byte-identical across reruns and worker counts") {
  const fs::path dir = scratch("determinism");
  const fs::path cfg = dir / "config_in.json";
  write_file(cfg, kSpectrumConfig);
  const fs::path a = dir / "a", b = dir / "b", c = dir / "c";

  CHECK(run_cli("'" + cfg.string() + "' --output-dir '" + a.string() + "' --workers 1", dir)
            .code == 0);
  CHECK(run_cli("'" + cfg.string() + "' --output-dir '" + b.string() + "' --workers 1", dir)
            .code == 0);
  CHECK(run_cli("'" + cfg.string() + "' --output-dir '" + c.string() + "' --workers 8", dir)
            .code == 0);

  for (const char* name : {"config.json", "report.json", "report.txt", "spectrum.csv"}) {
    const std::string ref = read_file(a / name);
    REQUIRE(!ref.empty());
    CHECK(read_file(b / name) == ref);  // rerun
    CHECK(read_file(c / name) == ref);  // different worker count
  }
}

TEST_CASE("the seed override changes the sampled data") {
  const fs::path dir = scratch("seed");
  const fs::path cfg = dir / "config_in.json";
  write_file(cfg, kSpectrumConfig);
  const fs::path a = dir / "a", b = dir / "b";
  CHECK(run_cli("'" + cfg.string() + "' --output-dir '" + a.string() + "' --seed 1", dir).code ==
        0);
  CHECK(run_cli("'" + cfg.string() + "' --output-dir '" + b.string() + "' --seed 2", dir).code ==
        0);
  CHECK(read_file(a / "spectrum.csv") != read_file(b / "spectrum.csv"));
  CHECK(read_file(a / "config.json") != read_file(b / "config.json"));  // seed is identity
}

TEST_CASE("the experiment override selects a different run") {
  const fs::path dir = scratch("override");
  const fs::path cfg = dir / "config_in.json";
  write_file(cfg, kSpectrumConfig);
  const fs::path out = dir / "run";
  const CliResult r = run_cli(
      "'" + cfg.string() + "' --experiment mode_energy --output-dir '" + out.string() + "'", dir);
  CHECK(r.code == 0);
  CHECK(fs::exists(out / "mode_energy.csv"));
  CHECK(!fs::exists(out / "spectrum.csv"));
  CHECK(read_file(out / "config.json").find("\"experiment\":\"mode_energy\"") !=
        std::string::npos);
}

TEST_CASE("a failing verdict exits 2 and records the failure") {
  const fs::path dir = scratch("verdict_fail");
  const fs::path cfg = dir / "config_in.json";
  write_file(cfg, kFailingCorr2Config);
  const fs::path out = dir / "run";
  const CliResult r =
      run_cli("'" + cfg.string() + "' --output-dir '" + out.string() + "'", dir);
  CHECK(r.code == 2);
  CHECK(read_file(out / "report.txt").find("verdict: FAIL") != std::string::npos);
  CHECK(read_file(out / "report.json").find("\"pass\": false") != std::string::npos);
}
