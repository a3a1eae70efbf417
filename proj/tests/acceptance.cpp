// Acceptance gate: one pass/fail line per criterion, nonzero exit on any
// failure.
//
// Criteria 1-12 are the numerical cross-model checks (run_validation), each
// with a pinned wall-time budget that is part of the verdict. Criterion 13 is
// the determinism contract: the full validation experiment, run twice with 1
// and 8 workers into separate directories, must produce byte-identical
// artifacts.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "sqv/config.hpp"
#include "sqv/experiments.hpp"
#include "sqv/validation.hpp"

namespace fs = std::filesystem;

namespace {

// wall-time budgets (seconds) for criteria 1..12, pinned
const double kBudget[12] = {1.0, 1.0, 1.0, 10.0, 60.0, 30.0, 1.0, 5.0, 5.0, 30.0, 300.0, 10.0};

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool report_line(int id, const std::string& name, bool pass, double seconds,
                 const std::string& details) {
  std::printf("[%2d/13] %s  %-28s (%6.2f s)  %s\n", id, pass ? "PASS" : "FAIL", name.c_str(),
              seconds, details.c_str());
  std::fflush(stdout);
  return pass;
}

}  // namespace

int main() {
  int passed = 0;

  const sqv::ValidationSummary summary = sqv::run_validation(sqv::ExecPolicy{8, 256});
  for (const sqv::CriterionResult& c : summary.criteria) {
    const double budget = kBudget[c.id - 1];
    const bool in_budget = c.elapsed_seconds <= budget;
    std::string details = c.details;
    if (!in_budget) {
      char buf[96];
      std::snprintf(buf, sizeof buf, "  [budget %.0f s exceeded]", budget);
      details += buf;
    }
    if (report_line(c.id, c.name, c.pass && in_budget, c.elapsed_seconds, details)) ++passed;
  }

  // criterion 13: rerun the whole validation suite as the packaged experiment,
  // once per worker count, and compare every artifact byte for byte
  std::printf("---- determinism: full validation experiment, 1 vs 8 workers ----\n");
  std::fflush(stdout);
  const auto t0 = std::chrono::steady_clock::now();
  bool det_pass = true;
  std::string det_details;
  try {
    const fs::path root = fs::temp_directory_path() / "sqv_acceptance";
    fs::remove_all(root);
    sqv::ExperimentConfig cfg;
    cfg.experiment = sqv::ExperimentKind::ValidateAll;

    cfg.workers = 1;
    cfg.output_dir = (root / "workers1").string();
    const int rc1 = sqv::run_experiment(cfg);

    cfg.workers = 8;
    cfg.output_dir = (root / "workers8").string();
    const int rc8 = sqv::run_experiment(cfg);

    if (rc1 != 0 || rc8 != 0) {
      det_pass = false;
      det_details = "validation experiment reported FAIL (exit " + std::to_string(rc1) + " / " +
                    std::to_string(rc8) + ")";
    } else {
      for (const char* name : {"config.json", "report.txt", "validation.json"}) {
        const std::string a = read_file(root / "workers1" / name);
        const std::string b = read_file(root / "workers8" / name);
        if (a.empty() || a != b) {
          det_pass = false;
          det_details += std::string(det_details.empty() ? "" : "; ") + name + " differs";
        }
      }
      if (det_pass) det_details = "3 artifacts byte-identical across worker counts";
    }
  } catch (const std::exception& e) {
    det_pass = false;
    det_details = std::string("exception: ") + e.what();
  }
  const double det_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (report_line(13, "determinism", det_pass, det_seconds, det_details)) ++passed;

  std::printf("RESULT: %s (%d/13)\n", passed == 13 ? "PASS" : "FAIL", passed);
  return passed == 13 ? 0 : 1;
}
