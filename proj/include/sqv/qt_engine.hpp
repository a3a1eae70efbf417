#pragma once
// Closed-form quantum predictions for the gated squeezed field.
//   spectrum            S(ω)      = |g(ω)|²
//   pair correlation    C²(ω,ω̃)  = g*(ω) g(ω̃) D(ω−ω̃)
//   photon number       N         = T ∫đω |g|²
//   fourth order        C⁴(a,b,c,d) = C_coh + C_incoh
//     C_coh   = g*(ω_a) f*(ω_a) f(ω_c) g(ω_c) · D(2ω0−ω_a−ω_b) D(2ω0−ω_d−ω_c)
//     C_incoh = |g(ω_a)|² |g(ω_b)|² · [D(ω_b−ω_c) D(ω_a−ω_d)
//                                      + ξ · D(ω_a−ω_c) D(ω_b−ω_d)]
// ξ = 1 for indistinguishable (same-polarization, colinear) photons, 0 for
// distinguishable. All D arguments are integer grid offsets, looked up in the
// gate kernel table so index symmetries hold exactly.

#include "sqv/correlators.hpp"
#include "sqv/gain.hpp"
#include "sqv/gate.hpp"

namespace sqv {

Eigen::ArrayXd spectrum_qt(const GainProfile& gain);

Corr2Result corr2_qt(const GainProfile& gain, const GateKernel& kernel,
                     const std::vector<ProbePair>& pairs);

struct PhotonNumber {
  double value = 0.0;
  double edge_ratio = 0.0;      // |g(edge)|²/max|g|²
  bool edge_leak_warning = false;  // edge_ratio > 1e−6: band truncates the integrand
};

PhotonNumber photon_number_qt(const GainProfile& gain, const GateKernel& kernel);

Corr4Tensor corr4_qt(const GainProfile& gain, const GateKernel& kernel,
                     const std::vector<ProbeQuad>& quads, int xi);

}  // namespace sqv
