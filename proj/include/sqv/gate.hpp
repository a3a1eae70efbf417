#pragma once
// Temporal gating of duration T. In the frequency domain the gate acts as a
// band-limited convolution with the window transform
//   W(Δ) = T sinc(ΔT/2),
// and pair correlations of gated fields carry the overlap kernel
//   D(Δ) = T sinc(ΔT/2),   D(0) = T,  ∫đΔ D = 1,  ∫đΔ D² = T.
// On the lattice every D argument is an integer multiple of dω, so D is
// tabulated once per offset (Toeplitz); prefix sums of D² support O(1)
// clamped-interval sums in the correlator quadratures.

#include <Eigen/Dense>
#include <complex>
#include <memory>
#include <utility>

#include "sqv/lattice.hpp"

namespace sqv {

// W(Δ) = T sinc(ΔT/2), sinc(x) = sin(x)/x
double window_transform(double duration, double delta);
// D(Δ) — identical functional form to W; named separately because it plays a
// different role (pair-correlation overlap, not field convolution)
double overlap_kernel(double duration, double delta);

class GateConvolver;  // forward (FFT workspace, one per thread)

class GateKernel {
 public:
  GateKernel(const FrequencyLattice& lat, double duration);

  const FrequencyLattice& lattice() const { return lat_; }
  double duration() const { return duration_; }

  double d(double delta) const { return overlap_kernel(duration_, delta); }
  // offset = j − k in grid steps, valid in [−(M−1), M−1]
  double d_at(int offset) const { return table_[offset + lat_.size() - 1]; }
  // Σ_{o=lo..hi} D(o·dω)²  (inclusive, clamped to the tabulated range)
  double d_sq_interval(int lo, int hi) const;

  // (|Σ đΔ D − 1|, |Σ đΔ D² − T|) over the tabulated offsets ±2·half_width
  std::pair<double, double> normalization_residual() const;
  // 2× the analytic sinc-tail bounds for the residuals above
  std::pair<double, double> normalization_tolerance() const;

  // true when duration · spectral_width < 50 (gate too short for the
  // fat-delta approximations to be meaningful); surfaced as a warning
  bool coherence_warning(double spectral_width) const {
    return duration_ * spectral_width < 50.0;
  }

  // gated field  A_j = Σ_l measure · W(ω_j − ω_l) · a_l
  Eigen::ArrayXcd gate_direct(const Eigen::Ref<const Eigen::ArrayXcd>& field) const;
  Eigen::ArrayXcd gate_fft(const Eigen::Ref<const Eigen::ArrayXcd>& field) const;
  // reusable FFT workspace for gating many realizations
  GateConvolver convolver() const;

 private:
  FrequencyLattice lat_;
  double duration_;
  Eigen::ArrayXd table_;      // D at offsets −(M−1)..M−1
  Eigen::ArrayXd sq_prefix_;  // prefix sums of table_²
  friend class GateConvolver;
};

class GateConvolver {
 public:
  explicit GateConvolver(const GateKernel& kernel);
  ~GateConvolver();
  GateConvolver(GateConvolver&&) noexcept;
  GateConvolver& operator=(GateConvolver&&) noexcept = delete;
  Eigen::ArrayXcd apply(const Eigen::Ref<const Eigen::ArrayXcd>& field);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace sqv
