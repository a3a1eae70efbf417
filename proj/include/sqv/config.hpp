#pragma once

// Experiment configuration: JSON file in, validated ExperimentConfig out.
//
// The canonical serialization (sorted keys, no whitespace, every field
// materialized) is the identity used for reproducibility: its 64-bit FNV-1a
// hash is embedded in every output file, and parse(canonical_json(c)) must
// reproduce c exactly. Validation errors carry the dotted path of the
// offending key ("gain.gamma: must be >= 0"); unknown keys are rejected so
// typos cannot silently fall back to defaults.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "sqv/gain.hpp"
#include "sqv/lattice.hpp"
#include "sqv/observables.hpp"
#include "sqv/probes.hpp"
#include "sqv/sf_engine.hpp"

namespace sqv {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ExperimentKind {
  Spectrum,
  Corr2,
  Corr4Identity,
  TpaScaling,
  SfgSpectrum,
  ModeEnergy,
  ValidateAll,
};

std::string to_string(ExperimentKind kind);
ExperimentKind experiment_kind_from(const std::string& name);

struct LatticeConfig {
  double omega0 = 1.0;
  double half_width = 0.5;
  int n_points = 257;
};

struct GateConfig {
  double duration = 50.0;
};

struct Corr4Config {
  QuadFamily family = QuadFamily::Random;
  int count = 32;
  int xi = 1;  // exchange term on (indistinguishable) or off
};

struct SfgConfig {
  double k2prime = 1.0;
  double length = 1.0;
  double xi_c = 1.0;
  int offset_count = 33;  // odd; ω₃ grid points, symmetric about 2ω₀
  int offset_span = 16;   // max |μ| in grid steps

  SfgParams params() const { return {k2prime, length, xi_c}; }
};

struct ModeConfig {
  double sigma = 0.125;
  int order = 0;  // 0 = Gaussian, 1 = odd first excited (x·Gaussian)
};

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::Spectrum;
  LatticeConfig lattice;
  GainParams gain{1.0, 1.0, 1.0};
  GateConfig gate;
  NoiseSpec noise{0.5, 1, 1000};
  Corr4Config corr4;
  TpaKernel tpa{2.0, 0.1, 1.0};
  std::vector<double> scaling_gammas;  // for TpaScaling; log-spaced default
  SfgConfig sfg;
  ModeConfig mode;
  std::string output_dir = "out";
  int workers = 1;

  FrequencyLattice make_lattice() const {
    return FrequencyLattice(lattice.omega0, lattice.half_width, lattice.n_points);
  }
};

// 9 log-spaced gain values across [1e-4, 1e-2], the default TpaScaling sweep
std::vector<double> default_scaling_gammas();

// Parse + validate. Throws ConfigError with a dotted-path message.
ExperimentConfig config_from_json_text(const std::string& text);
ExperimentConfig load_config(const std::string& path);

// Sorted-key, whitespace-free JSON with every field written out.
std::string canonical_json(const ExperimentConfig& cfg);

// canonical_json of the experiment identity: execution-only fields (workers,
// output_dir) normalized to their defaults. This string is the config-hash
// preimage and what run artifacts embed as config.json.
std::string canonical_identity_json(const ExperimentConfig& cfg);

std::uint64_t fnv1a64(std::string_view bytes);

// FNV-1a 64 of the canonical JSON with the execution-only fields (workers,
// output_dir) normalized to their defaults, as 16 lowercase hex digits: the
// hash names the experiment, so reruns with a different worker count or
// output location still produce byte-identical artifacts.
std::string config_hash_hex(const ExperimentConfig& cfg);

}  // namespace sqv
