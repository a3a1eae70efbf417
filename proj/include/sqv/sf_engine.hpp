#pragma once
// Classical stochastic-field model: Gaussian vacuum noise with per-point
// variance P_SF·2πδ(0), squeezed by the same Bogoliubov pair (f, g) as the
// quantum engine, then temporally gated. Closed-form moments and Monte Carlo
// estimators live side by side; "renormalized" quantities subtract the gain-
// free (g = 0) result computed from the identical noise realizations (common
// random numbers), which is what makes the subtraction usable inside MC error
// bars.
//
// Discrete conventions: a vacuum sample is
//   a_k = sqrt(P_SF · delta_peak) · (x + iy)/√2,   x, y ~ N(0,1),
// so ⟨a_j a*_k⟩ = P_SF · delta_peak · δ_jk  (the lattice form of
// P_SF·2πδ(ω−ω̃)) and ⟨a_j a_k⟩ = 0. Gated fields carry D-function units:
// the gate quadrature absorbs one factor measure·delta_peak = 1 per pairing,
// so raw moments of gated ensembles compare 1:1 with the closed forms (no
// delta_peak powers; pinned by tests).

#include <Eigen/Dense>
#include <cstdint>
#include <string>

#include "sqv/correlators.hpp"
#include "sqv/exec.hpp"
#include "sqv/gain.hpp"
#include "sqv/gate.hpp"
#include "sqv/qt_engine.hpp"

namespace sqv {

struct NoiseSpec {
  double p_sf = 0.5;        // vacuum-noise scale; ½ reproduces the quantum forms
  std::uint64_t seed = 1;   // master seed; realization r uses stream_seed(seed, r)
  int n_realizations = 0;
};

enum class EnsembleStage { Vacuum, Squeezed, Gated };

class FieldEnsemble {
 public:
  // realization-major storage: row r holds realization r over the lattice
  using Matrix =
      Eigen::Array<std::complex<double>, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  FieldEnsemble(const FrequencyLattice& lat, const NoiseSpec& spec, EnsembleStage stage,
                double gamma_z_tag);

  const FrequencyLattice& lattice() const { return lat_; }
  const NoiseSpec& spec() const { return spec_; }
  EnsembleStage stage() const { return stage_; }
  // gain imprinted on this ensemble (0 for vacuum / gain-free baselines)
  double gamma_z_tag() const { return gamma_z_tag_; }
  int realizations() const { return static_cast<int>(data_.rows()); }

  Matrix& data() { return data_; }
  const Matrix& data() const { return data_; }

  // raw little-endian float64 (re, im) pairs, realization-major, no header
  void save_binary(const std::string& path) const;
  void save_csv(const std::string& path) const;

 private:
  FrequencyLattice lat_;
  NoiseSpec spec_;
  EnsembleStage stage_;
  double gamma_z_tag_;
  Matrix data_;
};

FieldEnsemble sample_vacuum(const FrequencyLattice& lat, const NoiseSpec& spec,
                            const ExecPolicy& exec);
// b = f·a + g·conj(mirror a); requires a Vacuum ensemble on the same lattice
FieldEnsemble squeeze(const FieldEnsemble& vacuum, const GainProfile& gain,
                      const ExecPolicy& exec);
// FFT-gate every realization; accepts Vacuum (baseline) or Squeezed input
FieldEnsemble gate(const FieldEnsemble& input, const GateKernel& kernel,
                   const ExecPolicy& exec);

struct SpectrumEstimate {
  Eigen::ArrayXd values;
  Eigen::ArrayXd stderrs;
};

// ⟨|b_k|²⟩ / delta_peak on an ungated ensemble; converges to P_SF(2|g|²+1)
SpectrumEstimate spectrum_sf(const FieldEnsemble& ensemble);
// common-random-number subtraction of the vacuum baseline; converges to
// 2·P_SF·|g|²
SpectrumEstimate spectrum_sf_renormalized(const FieldEnsemble& squeezed,
                                          const FieldEnsemble& vacuum);
// closed form P_SF(2|g|²+1)
Eigen::ArrayXd spectrum_sf_closed(const GainProfile& gain, double p_sf);
// renormalized closed form 2·P_SF·|g|², computed under the point (not as a
// difference of totals) so the low-gain tail keeps full precision
Eigen::ArrayXd spectrum_sf_renormalized_closed(const GainProfile& gain, double p_sf);

// closed form P_SF(f*(ω_i) f(ω_j) + g*(ω_i) g(ω_j)) D(ω_i−ω_j)
Corr2Result corr2_sf_closed(const GainProfile& gain, const GateKernel& kernel,
                            const std::vector<ProbePair>& pairs, double p_sf);

// closed-form gated energy T ∫đω P_SF(2|g|²+1), in photon-number units
PhotonNumber energy_sf_closed(const GainProfile& gain, const GateKernel& kernel, double p_sf);
// the g = 0 baseline T ∫đω P_SF
double energy_sf_baseline(const FrequencyLattice& lat, const GateKernel& kernel, double p_sf);
// N_SF − N_SF|g=0 evaluated pointwise under the integral (T ∫đω 2 P_SF |g|²);
// subtracting the two totals instead would lose ~5 digits to cancellation
PhotonNumber energy_sf_renormalized(const GainProfile& gain, const GateKernel& kernel,
                                    double p_sf);

// closed form, two-term breakdown:
//   pair_term  C_cor   = 4P² f*(ω_a) g*(ω_a) f(ω_c) g(ω_c) D(2ω0−ω_a−ω_b) D(2ω0−ω_c−ω_d)
//   background C_uncor = 4P² (|g(ω_a)|²+½)(|g(ω_b)|²+½)
//                        · [D(ω_a−ω_d) D(ω_b−ω_c) + D(ω_a−ω_c) D(ω_b−ω_d)]
Corr4Tensor corr4_sf_closed(const GainProfile& gain, const GateKernel& kernel,
                            const std::vector<ProbeQuad>& quads, double p_sf);

// per-quad ⟨c*_a c*_b c_c c_d⟩ over a gated ensemble, delete-one jackknife
// error bars; raw gated moments are already in D-function units (see header)
Corr4Tensor corr4_sf_mc(const FieldEnsemble& gated, const std::vector<ProbeQuad>& quads);
// paired (common-random-number) subtraction of a gain-free gated baseline
Corr4Tensor corr4_sf_mc_renormalized(const FieldEnsemble& gated,
                                     const FieldEnsemble& gated_baseline,
                                     const std::vector<ProbeQuad>& quads);

// closed-form subtraction, same quads required; loses accuracy where the two
// tensors nearly cancel — prefer corr4_sf_renormalized_closed for identities
Corr4Tensor renormalize(const Corr4Tensor& value, const Corr4Tensor& baseline);

// cancellation-free renormalized closed form: the g = 0 baseline is removed
// term by term under the products,
//   background = 4P² [|g_a|²|g_b|² + ½(|g_a|²+|g_b|²)]
//                · [D(ω_a−ω_d) D(ω_b−ω_c) + D(ω_a−ω_c) D(ω_b−ω_d)],
// while the pair term is unchanged (its baseline vanishes with g)
Corr4Tensor corr4_sf_renormalized_closed(const GainProfile& gain, const GateKernel& kernel,
                                         const std::vector<ProbeQuad>& quads, double p_sf);

// the analytic residual separating the renormalized stochastic background
// from the quantum incoherent term at P_SF = ½, ξ = 1:
//   ½(|g(ω_a)|²+|g(ω_b)|²)·[D(ω_a−ω_d) D(ω_b−ω_c) + D(ω_a−ω_c) D(ω_b−ω_d)]
Eigen::ArrayXd corr4_cross_term(const GainProfile& gain, const GateKernel& kernel,
                                const std::vector<ProbeQuad>& quads);

// streaming vacuum-stage calibration statistics at probe columns
struct VacuumProbeStats {
  Eigen::ArrayXd variance, variance_stderr;       // mean |a|² and its error
  Eigen::ArrayXcd pseudo;                         // mean a a (unconjugated)
  Eigen::ArrayXd pseudo_stderr;
};
VacuumProbeStats vacuum_probe_stats(const FrequencyLattice& lat, const NoiseSpec& spec,
                                    const std::vector<int>& probes, const ExecPolicy& exec);

}  // namespace sqv
