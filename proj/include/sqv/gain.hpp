#pragma once
// Two-mode squeezing (Bogoliubov) coefficients over the lattice:
//   b(ω) = f(ω) a(ω) + g(ω) a*(2ω0 − ω)
//   f = cosh(sz) − i (Δk/2s) sinh(sz),   g = i (γ/s) sinh(sz)
//   Δk(ω) = −κ (ω − ω0)²
// with two conventions for s:
//   PaperLiteral:  s = sqrt(γ² − Δk²)        (matches the printed low/high
//                                             gain asymptotes; violates
//                                             |f|² − |g|² = 1 off-center)
//   Unitary:       s = sqrt(γ² − (Δk/2)²)    (restores |f|² − |g|² = 1;
//                                             default)
// Near s → 0 the hyperbolic ratios are evaluated by series in (sz)² to avoid
// 0/0. Optional dispersion compensation multiplies f (only f) by
// exp(−i·arg f_lowgain), the externally-compressed pulse picture.

#include <Eigen/Dense>
#include <complex>

#include "sqv/lattice.hpp"

namespace sqv {

enum class SqueezeConvention { PaperLiteral, Unitary };

struct GainParams {
  double gamma = 1.0;  // pump-strength rate (per unit length)
  double kappa = 1.0;  // group-velocity-dispersion curvature of the phase mismatch
  double z = 1.0;      // propagation length
  SqueezeConvention convention = SqueezeConvention::Unitary;
  bool compensate_dispersion = false;
  double gamma_z() const { return gamma * z; }
};

// Δk(ω) = −κ (ω − ω0)²
Eigen::ArrayXd phase_mismatch(const FrequencyLattice& lat, double kappa);

// complex branch: real for γ² > c·Δk², +i·w otherwise
std::complex<double> s_parameter(double gamma, double delta_k, SqueezeConvention conv);

class GainProfile {
 public:
  GainProfile(const FrequencyLattice& lat, const GainParams& p);

  const Eigen::ArrayXcd& f() const { return f_; }
  const Eigen::ArrayXcd& g() const { return g_; }
  const FrequencyLattice& lattice() const { return lat_; }
  const GainParams& params() const { return params_; }

  // |f|² − |g|² − 1 per point (0 in exact arithmetic under Unitary)
  Eigen::ArrayXd unitarity_defect() const;
  // the same residual scaled by (|f|²+|g|²+1): storing f and g in doubles puts
  // an absolute floor ~cosh²(γz)·ε under the raw residual at high gain, so the
  // invariant is asserted in this scale-aware form
  Eigen::ArrayXd unitarity_defect_relative() const;
  // |g(edge)|² / max|g|², the band-truncation leak indicator
  double edge_ratio() const;
  // full width at half maximum of |g|² (grid resolution), for gate validation
  double spectral_width_fwhm() const;

 private:
  FrequencyLattice lat_;
  GainParams params_;
  Eigen::ArrayXcd f_, g_;
};

// Low-gain asymptote  g → i γz sinc(κ(ω−ω0)² z)  (follows from PaperLiteral s)
Eigen::ArrayXcd low_gain_g(const FrequencyLattice& lat, const GainParams& p);

// High-gain asymptote magnitude  |f| → ½ e^{γz} exp[−(κ²z/2γ)(ω−ω0)⁴],
// with g → i·f (follows from PaperLiteral s on the compensated branch)
Eigen::ArrayXd high_gain_f(const FrequencyLattice& lat, const GainParams& p);

}  // namespace sqv
