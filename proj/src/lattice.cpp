#include "sqv/lattice.hpp"

#include <stdexcept>
#include <string>

namespace sqv {

FrequencyLattice::FrequencyLattice(double omega0, double half_width, int n_points)
    : omega0_(omega0), half_width_(half_width), n_(n_points) {
  if (!(omega0 > 0.0))
    throw std::invalid_argument("lattice: omega0 must be > 0, got " + std::to_string(omega0));
  if (!(half_width > 0.0))
    throw std::invalid_argument("lattice: half_width must be > 0, got " +
                                std::to_string(half_width));
  if (!(half_width < omega0))
    throw std::invalid_argument(
        "lattice: half_width must be < omega0 so all frequencies stay positive");
  if (n_points < 3 || n_points % 2 == 0)
    throw std::invalid_argument("lattice: n_points must be odd and >= 3, got " +
                                std::to_string(n_points));
  d_ = 2.0 * half_width_ / static_cast<double>(n_ - 1);
  measure_ = d_ / (2.0 * M_PI);
  delta_peak_ = (2.0 * M_PI) / d_;
  const int h = (n_ - 1) / 2;
  detunings_.resize(n_);
  omegas_.resize(n_);
  for (int k = 0; k < n_; ++k) {
    // integer offsets keep the mirror map k -> M-1-k exact in floating point
    detunings_[k] = static_cast<double>(k - h) * d_;
    omegas_[k] = omega0_ + detunings_[k];
  }
}

double integrate(const FrequencyLattice& lat, const Eigen::Ref<const Eigen::ArrayXd>& f) {
  if (f.size() != lat.size())
    throw std::invalid_argument("integrate: sample count does not match lattice size");
  return lat.measure() * f.sum();
}

std::complex<double> integrate(const FrequencyLattice& lat,
                               const Eigen::Ref<const Eigen::ArrayXcd>& f) {
  if (f.size() != lat.size())
    throw std::invalid_argument("integrate: sample count does not match lattice size");
  return lat.measure() * f.sum();
}

}  // namespace sqv
