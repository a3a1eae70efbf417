// sqvsim — batch front end.
//
//   sqvsim CONFIG.json [--experiment NAME] [--output-dir DIR]
//                      [--seed N] [--workers N]
//
// Exit codes: 0 success / all verdicts PASS, 1 usage error (bad flags or
// invalid config), 2 validation failure (an emitted verdict is FAIL),
// 3 internal assertion failure. Errors print a one-line machine-parsable
// JSON record to stderr.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdint>
#include <cstdio>
#include <exception>
#include <string>

#include "sqv/config.hpp"
#include "sqv/experiments.hpp"
#include "sqv/report.hpp"

namespace {

void error_record(const char* kind, const std::string& message) {
  nlohmann::json j{{"error", {{"kind", kind}, {"message", message}}}};
  std::fprintf(stderr, "%s\n", j.dump().c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{std::string("sqvsim ") + sqv::kVersion +
               " — squeezed-vacuum simulator: quantum closed forms vs the classical "
               "stochastic-field model"};

  std::string config_path, output_dir, experiment;
  std::uint64_t seed = 0;
  int workers = 1;
  app.add_option("config", config_path, "experiment config (JSON)")->required();
  auto* opt_experiment = app.add_option(
      "--experiment", experiment,
      "override: spectrum|corr2|corr4_identity|tpa_scaling|sfg_spectrum|mode_energy|"
      "validate_all");
  auto* opt_output = app.add_option("--output-dir", output_dir, "override the output directory");
  auto* opt_seed = app.add_option("--seed", seed, "override the master noise seed");
  auto* opt_workers =
      app.add_option("--workers", workers, "worker threads (output is worker-count invariant)")
          ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);  // prints help/usage text
    if (code == 0) return 0;       // --help / --version
    error_record("usage", e.what());
    return 1;
  }

  sqv::ExperimentConfig cfg;
  try {
    cfg = sqv::load_config(config_path);
    if (opt_experiment->count() > 0) cfg.experiment = sqv::experiment_kind_from(experiment);
    if (opt_output->count() > 0) cfg.output_dir = output_dir;
    if (opt_seed->count() > 0) cfg.noise.seed = seed;
    if (opt_workers->count() > 0) cfg.workers = workers;
    // overrides can change which cross-field rules apply (e.g. switching to
    // TpaScaling), so the final config goes through the validator again via
    // its canonical form
    cfg = sqv::config_from_json_text(sqv::canonical_json(cfg));
  } catch (const sqv::ConfigError& e) {
    error_record("usage", e.what());
    return 1;
  } catch (const std::exception& e) {
    error_record("internal", e.what());
    return 3;
  }

  try {
    return sqv::run_experiment(cfg);
  } catch (const std::exception& e) {
    error_record("internal", e.what());
    return 3;
  }
}
