#pragma once
// Uniform frequency lattice, symmetric about the carrier omega0, and the
// discretization conventions used throughout:
//   - integrals  ∫ đω f  :=  Σ_k measure() · f(ω_k)   with  đω = dω/2π,
//     plain uniform weights (intended integrands decay at the band edges);
//   - the singular weight 2πδ(0) is represented on the grid by
//     delta_peak() = 2π/dω, so that measure() · delta_peak() == 1 to within
//     one rounding (exactly 1 for most grids; the two factors are rounded
//     separately, so the product can land one ulp off);
//   - 2πδ(ω_j − ω_k)  ↔  delta_peak() · δ_jk (Kronecker).
// Mirror reflection ω ↦ 2ω0 − ω is the exact index permutation k ↦ M−1−k.

#include <Eigen/Dense>
#include <complex>

namespace sqv {

class FrequencyLattice {
 public:
  // n_points must be odd so the carrier sits exactly on the grid.
  FrequencyLattice(double omega0, double half_width, int n_points);

  double omega0() const { return omega0_; }
  double half_width() const { return half_width_; }
  int size() const { return n_; }
  double d_omega() const { return d_; }
  double measure() const { return measure_; }        // dω/2π
  double delta_peak() const { return delta_peak_; }  // 2π/dω

  double omega(int k) const { return omegas_[k]; }
  const Eigen::ArrayXd& omegas() const { return omegas_; }
  // ω_k − ω0, exact multiples of d_omega
  const Eigen::ArrayXd& detunings() const { return detunings_; }

  int center_index() const { return (n_ - 1) / 2; }
  int mirror_index(int k) const { return n_ - 1 - k; }
  bool contains_index(long k) const { return k >= 0 && k < n_; }

 private:
  double omega0_, half_width_;
  int n_;
  double d_, measure_, delta_peak_;
  Eigen::ArrayXd omegas_, detunings_;
};

// Riemann sum Σ measure · f_k over the band.
double integrate(const FrequencyLattice& lat, const Eigen::Ref<const Eigen::ArrayXd>& f);
std::complex<double> integrate(const FrequencyLattice& lat,
                               const Eigen::Ref<const Eigen::ArrayXcd>& f);

}  // namespace sqv
