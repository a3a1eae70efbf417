#include "sqv/config.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <utility>

namespace sqv {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
  throw ConfigError("config: " + path + ": " + msg);
}

std::string join(const std::string& a, const char* b) {
  return a.empty() ? std::string(b) : a + "." + b;
}

// one JSON object; tracks which keys were read so leftovers can be rejected
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(path_.empty() ? "<root>" : path_, "expected an object");
  }

  bool has(const char* key) {
    seen_.insert(key);
    return j_.contains(key);
  }

  const json& at(const char* key) const { return j_.at(key); }

  double number(const char* key, double fallback) {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_number()) fail(join(path_, key), "expected a number");
    return v.get<double>();
  }

  int integer(const char* key, int fallback) {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_number_integer()) fail(join(path_, key), "expected an integer");
    return static_cast<int>(v.get<std::int64_t>());
  }

  std::uint64_t uinteger(const char* key, std::uint64_t fallback) {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer() && v.get<std::int64_t>() >= 0)
      return static_cast<std::uint64_t>(v.get<std::int64_t>());
    fail(join(path_, key), "expected a non-negative integer");
  }

  bool boolean(const char* key, bool fallback) {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_boolean()) fail(join(path_, key), "expected a boolean");
    return v.get<bool>();
  }

  std::string text(const char* key, std::string fallback) {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_string()) fail(join(path_, key), "expected a string");
    return v.get<std::string>();
  }

  std::vector<double> numbers(const char* key, std::vector<double> fallback) {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_array()) fail(join(path_, key), "expected an array of numbers");
    std::vector<double> out;
    out.reserve(v.size());
    for (const json& el : v) {
      if (!el.is_number()) fail(join(path_, key), "expected an array of numbers");
      out.push_back(el.get<double>());
    }
    return out;
  }

  void finish() const {
    for (const auto& el : j_.items())
      if (seen_.find(el.key()) == seen_.end())
        fail(path_.empty() ? el.key() : path_ + "." + el.key(), "unknown key");
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string, std::less<>> seen_;
};

SqueezeConvention convention_from(const std::string& name, const std::string& path) {
  if (name == "unitary") return SqueezeConvention::Unitary;
  if (name == "paper_literal") return SqueezeConvention::PaperLiteral;
  fail(path, "unknown convention '" + name + "' (expected unitary or paper_literal)");
}

const char* convention_name(SqueezeConvention c) {
  return c == SqueezeConvention::Unitary ? "unitary" : "paper_literal";
}

QuadFamily family_from(const std::string& name, const std::string& path) {
  if (name == "degenerate") return QuadFamily::Degenerate;
  if (name == "ridge") return QuadFamily::Ridge;
  if (name == "random") return QuadFamily::Random;
  fail(path, "unknown quad family '" + name + "' (expected degenerate, ridge or random)");
}

const char* family_name(QuadFamily f) {
  switch (f) {
    case QuadFamily::Degenerate: return "degenerate";
    case QuadFamily::Ridge: return "ridge";
    case QuadFamily::Random: return "random";
  }
  return "random";
}

void validate(const ExperimentConfig& cfg) {
  const auto check = [](bool ok, const char* path, const char* msg) {
    if (!ok) fail(path, msg);
  };
  check(cfg.lattice.n_points >= 3, "lattice.n_points", "must be >= 3");
  check(cfg.lattice.n_points % 2 == 1, "lattice.n_points", "must be odd (symmetric band)");
  check(cfg.lattice.half_width > 0.0, "lattice.half_width", "must be > 0");
  check(cfg.lattice.omega0 > cfg.lattice.half_width, "lattice.omega0",
        "band must stay at positive frequencies (omega0 > half_width)");
  check(cfg.gain.gamma >= 0.0, "gain.gamma", "must be >= 0");
  check(cfg.gain.kappa >= 0.0, "gain.kappa", "must be >= 0");
  check(cfg.gain.z > 0.0, "gain.z", "must be > 0");
  check(cfg.gate.duration > 0.0, "gate.duration", "must be > 0");
  const double d_omega = 2.0 * cfg.lattice.half_width / (cfg.lattice.n_points - 1);
  check(cfg.gate.duration * d_omega < 2.0 * M_PI, "gate.duration",
        "aliased: need duration * d_omega < 2*pi (refine the lattice or shorten the gate)");
  check(cfg.noise.p_sf > 0.0, "noise.p_sf", "must be > 0");
  check(cfg.noise.n_realizations >= 2, "noise.n_realizations", "must be >= 2");
  check(cfg.corr4.count >= 1, "corr4.count", "must be >= 1");
  check(cfg.corr4.xi == 0 || cfg.corr4.xi == 1, "corr4.xi", "must be 0 or 1");
  check(cfg.tpa.omega_f > 0.0, "tpa.omega_f", "must be > 0");
  check(cfg.tpa.sigma_f > 0.0, "tpa.sigma_f", "must be > 0");
  check(cfg.tpa.amplitude > 0.0, "tpa.amplitude", "must be > 0");
  check(cfg.sfg.length > 0.0, "sfg.length", "must be > 0");
  check(cfg.sfg.xi_c > 0.0, "sfg.xi_c", "must be > 0");
  check(cfg.sfg.offset_count >= 1 && cfg.sfg.offset_count % 2 == 1, "sfg.offset_count",
        "must be odd and >= 1");
  check(cfg.sfg.offset_span >= 0, "sfg.offset_span", "must be >= 0");
  check(cfg.mode.sigma > 0.0, "mode.sigma", "must be > 0");
  check(cfg.mode.order == 0 || cfg.mode.order == 1, "mode.order", "must be 0 or 1");
  check(!cfg.output_dir.empty(), "output_dir", "must not be empty");
  check(cfg.workers >= 1, "workers", "must be >= 1");

  if (cfg.experiment == ExperimentKind::TpaScaling) {
    check(cfg.scaling_gammas.size() >= 3, "tpa_scaling.gammas", "need at least 3 values");
    double lo = cfg.scaling_gammas.front(), hi = lo;
    for (double g : cfg.scaling_gammas) {
      check(g > 0.0, "tpa_scaling.gammas", "values must be > 0");
      lo = std::min(lo, g);
      hi = std::max(hi, g);
    }
    check(hi >= 100.0 * (1.0 - 1e-12) * lo, "tpa_scaling.gammas",
          "must span at least 2 decades");
    const double smax = std::sinh(hi * cfg.gain.z);
    check(smax * smax <= 1e-2, "tpa_scaling.gammas",
          "outside the low-gain regime (sinh^2(gamma*z) > 1e-2 at the top)");
    check(cfg.tpa.sigma_f >= 3.0 * d_omega, "tpa.sigma_f",
          "under-resolved on this lattice (need >= 3 * d_omega)");
  }
  if (cfg.experiment == ExperimentKind::SfgSpectrum) {
    check(cfg.sfg.offset_span <= cfg.lattice.n_points - 1, "sfg.offset_span",
          "outside the reachable sum band (max n_points - 1)");
    const double step =
        d_omega * 0.5 * cfg.sfg.k2prime * cfg.sfg.length * (2.0 * cfg.lattice.half_width);
    check(std::abs(step) <= M_PI / 4.0, "sfg.k2prime",
          "phase-matching oscillation under-resolved (need d_omega*(k''L/2)*band <= pi/4)");
  }
}

ExperimentConfig parse(const json& root) {
  ExperimentConfig cfg;
  Section r(root, "");
  if (r.has("experiment")) {
    const json& v = r.at("experiment");
    if (!v.is_string()) fail("experiment", "expected a string");
    try {
      cfg.experiment = experiment_kind_from(v.get<std::string>());
    } catch (const ConfigError& e) {
      fail("experiment", e.what());
    }
  }
  if (r.has("lattice")) {
    Section s(r.at("lattice"), "lattice");
    cfg.lattice.omega0 = s.number("omega0", cfg.lattice.omega0);
    cfg.lattice.half_width = s.number("half_width", cfg.lattice.half_width);
    cfg.lattice.n_points = s.integer("n_points", cfg.lattice.n_points);
    s.finish();
  }
  if (r.has("gain")) {
    Section s(r.at("gain"), "gain");
    cfg.gain.gamma = s.number("gamma", cfg.gain.gamma);
    cfg.gain.kappa = s.number("kappa", cfg.gain.kappa);
    cfg.gain.z = s.number("z", cfg.gain.z);
    if (s.has("convention")) {
      const json& v = s.at("convention");
      if (!v.is_string()) fail("gain.convention", "expected a string");
      cfg.gain.convention = convention_from(v.get<std::string>(), "gain.convention");
    }
    cfg.gain.compensate_dispersion =
        s.boolean("compensate_dispersion", cfg.gain.compensate_dispersion);
    s.finish();
  }
  if (r.has("gate")) {
    Section s(r.at("gate"), "gate");
    cfg.gate.duration = s.number("duration", cfg.gate.duration);
    s.finish();
  }
  if (r.has("noise")) {
    Section s(r.at("noise"), "noise");
    cfg.noise.p_sf = s.number("p_sf", cfg.noise.p_sf);
    cfg.noise.seed = s.uinteger("seed", cfg.noise.seed);
    cfg.noise.n_realizations = s.integer("n_realizations", cfg.noise.n_realizations);
    s.finish();
  }
  if (r.has("corr4")) {
    Section s(r.at("corr4"), "corr4");
    if (s.has("family")) {
      const json& v = s.at("family");
      if (!v.is_string()) fail("corr4.family", "expected a string");
      cfg.corr4.family = family_from(v.get<std::string>(), "corr4.family");
    }
    cfg.corr4.count = s.integer("count", cfg.corr4.count);
    cfg.corr4.xi = s.integer("xi", cfg.corr4.xi);
    s.finish();
  }
  if (r.has("tpa")) {
    Section s(r.at("tpa"), "tpa");
    cfg.tpa.omega_f = s.number("omega_f", cfg.tpa.omega_f);
    cfg.tpa.sigma_f = s.number("sigma_f", cfg.tpa.sigma_f);
    cfg.tpa.amplitude = s.number("amplitude", cfg.tpa.amplitude);
    s.finish();
  }
  if (r.has("tpa_scaling")) {
    Section s(r.at("tpa_scaling"), "tpa_scaling");
    cfg.scaling_gammas = s.numbers("gammas", cfg.scaling_gammas);
    s.finish();
  }
  if (r.has("sfg")) {
    Section s(r.at("sfg"), "sfg");
    cfg.sfg.k2prime = s.number("k2prime", cfg.sfg.k2prime);
    cfg.sfg.length = s.number("length", cfg.sfg.length);
    cfg.sfg.xi_c = s.number("xi_c", cfg.sfg.xi_c);
    cfg.sfg.offset_count = s.integer("offset_count", cfg.sfg.offset_count);
    cfg.sfg.offset_span = s.integer("offset_span", cfg.sfg.offset_span);
    s.finish();
  }
  if (r.has("mode")) {
    Section s(r.at("mode"), "mode");
    cfg.mode.sigma = s.number("sigma", cfg.mode.sigma);
    cfg.mode.order = s.integer("order", cfg.mode.order);
    s.finish();
  }
  cfg.output_dir = r.text("output_dir", cfg.output_dir);
  cfg.workers = r.integer("workers", cfg.workers);
  r.finish();
  if (cfg.scaling_gammas.empty()) cfg.scaling_gammas = default_scaling_gammas();
  validate(cfg);
  return cfg;
}

}  // namespace

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::Spectrum: return "spectrum";
    case ExperimentKind::Corr2: return "corr2";
    case ExperimentKind::Corr4Identity: return "corr4_identity";
    case ExperimentKind::TpaScaling: return "tpa_scaling";
    case ExperimentKind::SfgSpectrum: return "sfg_spectrum";
    case ExperimentKind::ModeEnergy: return "mode_energy";
    case ExperimentKind::ValidateAll: return "validate_all";
  }
  return "spectrum";
}

ExperimentKind experiment_kind_from(const std::string& name) {
  if (name == "spectrum") return ExperimentKind::Spectrum;
  if (name == "corr2") return ExperimentKind::Corr2;
  if (name == "corr4_identity") return ExperimentKind::Corr4Identity;
  if (name == "tpa_scaling") return ExperimentKind::TpaScaling;
  if (name == "sfg_spectrum") return ExperimentKind::SfgSpectrum;
  if (name == "mode_energy") return ExperimentKind::ModeEnergy;
  if (name == "validate_all") return ExperimentKind::ValidateAll;
  throw ConfigError("unknown experiment '" + name +
                    "' (expected spectrum, corr2, corr4_identity, tpa_scaling, sfg_spectrum, "
                    "mode_energy or validate_all)");
}

std::vector<double> default_scaling_gammas() {
  std::vector<double> g;
  g.reserve(9);
  for (int i = 0; i < 9; ++i) g.push_back(std::pow(10.0, -4.0 + 0.25 * i));
  return g;
}

ExperimentConfig config_from_json_text(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: JSON parse error: ") + e.what());
  }
  return parse(root);
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return config_from_json_text(ss.str());
}

std::string canonical_json(const ExperimentConfig& cfg) {
  json j;
  j["experiment"] = to_string(cfg.experiment);
  j["lattice"] = {{"omega0", cfg.lattice.omega0},
                  {"half_width", cfg.lattice.half_width},
                  {"n_points", cfg.lattice.n_points}};
  j["gain"] = {{"gamma", cfg.gain.gamma},
               {"kappa", cfg.gain.kappa},
               {"z", cfg.gain.z},
               {"convention", convention_name(cfg.gain.convention)},
               {"compensate_dispersion", cfg.gain.compensate_dispersion}};
  j["gate"] = {{"duration", cfg.gate.duration}};
  j["noise"] = {{"p_sf", cfg.noise.p_sf},
                {"seed", cfg.noise.seed},
                {"n_realizations", cfg.noise.n_realizations}};
  j["corr4"] = {{"family", family_name(cfg.corr4.family)},
                {"count", cfg.corr4.count},
                {"xi", cfg.corr4.xi}};
  j["tpa"] = {{"omega_f", cfg.tpa.omega_f},
              {"sigma_f", cfg.tpa.sigma_f},
              {"amplitude", cfg.tpa.amplitude}};
  j["tpa_scaling"] = {{"gammas", cfg.scaling_gammas}};
  j["sfg"] = {{"k2prime", cfg.sfg.k2prime},
              {"length", cfg.sfg.length},
              {"xi_c", cfg.sfg.xi_c},
              {"offset_count", cfg.sfg.offset_count},
              {"offset_span", cfg.sfg.offset_span}};
  j["mode"] = {{"sigma", cfg.mode.sigma}, {"order", cfg.mode.order}};
  j["output_dir"] = cfg.output_dir;
  j["workers"] = cfg.workers;
  return j.dump();
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string canonical_identity_json(const ExperimentConfig& cfg) {
  // The identity form names the experiment — physics, probes, seeds — not the
  // execution resources or where the artifacts land. Hashing it (rather than
  // the full canonical form) keeps output files byte-identical across worker
  // counts (the determinism contract) and across output relocations.
  ExperimentConfig id = cfg;
  id.workers = 1;
  id.output_dir = "out";
  return canonical_json(id);
}

std::string config_hash_hex(const ExperimentConfig& cfg) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(canonical_identity_json(cfg))));
  return buf;
}

}  // namespace sqv
