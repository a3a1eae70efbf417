#include "sqv/gain.hpp"

#include <cmath>
#include <stdexcept>

namespace sqv {

namespace {

using cd = std::complex<double>;

// sinh(x)/x and cosh(x) as functions of x² (valid for real or imaginary x);
// series branch keeps the s → 0 line regular.
struct HyperbolicPair {
  cd cosh_x;
  cd sinhc_x;  // sinh(x)/x
};

HyperbolicPair hyperbolics(cd x2) {
  // |x| < 1e-6  <=>  |x2| < 1e-12; quartic series then has error ~1e-39
  if (std::abs(x2) < 1e-12) {
    const cd c = 1.0 + x2 / 2.0 + x2 * x2 / 24.0;
    const cd s = 1.0 + x2 / 6.0 + x2 * x2 / 120.0;
    return {c, s};
  }
  const cd x = std::sqrt(x2);  // principal branch; cosh and sinh/x are even in x
  return {std::cosh(x), std::sinh(x) / x};
}

double convention_quarter(SqueezeConvention conv) {
  return conv == SqueezeConvention::Unitary ? 0.25 : 1.0;
}

// arg of the γ→0 limit of f, the phase removed by an external compressor.
// Unitary: f_lg = exp(−iΔk z/2) exactly. PaperLiteral: f_lg is not a pure
// phase (cos(|Δk|z) − (i/2)·sign(Δk)·sin(|Δk|z)); we still remove its arg.
double low_gain_phase(double delta_k, double z, SqueezeConvention conv) {
  if (conv == SqueezeConvention::Unitary) return -0.5 * delta_k * z;
  const double th = std::abs(delta_k) * z;
  const double sgn = delta_k >= 0.0 ? 1.0 : -1.0;
  return std::atan2(-0.5 * sgn * std::sin(th), std::cos(th));
}

}  // namespace

Eigen::ArrayXd phase_mismatch(const FrequencyLattice& lat, double kappa) {
  return -kappa * lat.detunings().square();
}

std::complex<double> s_parameter(double gamma, double delta_k, SqueezeConvention conv) {
  const double s2 = gamma * gamma - convention_quarter(conv) * delta_k * delta_k;
  return std::sqrt(cd(s2, 0.0));
}

GainProfile::GainProfile(const FrequencyLattice& lat, const GainParams& p)
    : lat_(lat), params_(p) {
  if (!(p.gamma >= 0.0)) throw std::invalid_argument("gain: gamma must be >= 0");
  if (!(p.kappa >= 0.0)) throw std::invalid_argument("gain: kappa must be >= 0");
  if (!(p.z > 0.0)) throw std::invalid_argument("gain: z must be > 0");
  const int n = lat_.size();
  f_.resize(n);
  g_.resize(n);
  const Eigen::ArrayXd dk = phase_mismatch(lat_, p.kappa);
  const double q = convention_quarter(p.convention);
  for (int k = 0; k < n; ++k) {
    const double s2 = p.gamma * p.gamma - q * dk[k] * dk[k];
    const cd x2 = cd(s2 * p.z * p.z, 0.0);
    const auto [cosh_x, sinhc_x] = hyperbolics(x2);
    // f = cosh(sz) − i(Δk/2)·z·sinh(sz)/(sz);  g = iγz·sinh(sz)/(sz)
    cd f = cosh_x - cd(0.0, 0.5 * dk[k] * p.z) * sinhc_x;
    const cd g = cd(0.0, p.gamma * p.z) * sinhc_x;
    if (p.compensate_dispersion) {
      const double phi = low_gain_phase(dk[k], p.z, p.convention);
      f *= std::polar(1.0, -phi);
    }
    f_[k] = f;
    g_[k] = g;
  }
}

Eigen::ArrayXd GainProfile::unitarity_defect() const {
  return f_.abs2() - g_.abs2() - 1.0;
}

Eigen::ArrayXd GainProfile::unitarity_defect_relative() const {
  const Eigen::ArrayXd fa = f_.abs2();
  const Eigen::ArrayXd ga = g_.abs2();
  return (fa - ga - 1.0) / (fa + ga + 1.0);
}

double GainProfile::edge_ratio() const {
  const double peak = g_.abs2().maxCoeff();
  if (peak == 0.0) return 0.0;
  return std::max(std::norm(g_[0]), std::norm(g_[lat_.size() - 1])) / peak;
}

double GainProfile::spectral_width_fwhm() const {
  const Eigen::ArrayXd p = g_.abs2();
  const double half = 0.5 * p.maxCoeff();
  int lo = lat_.center_index(), hi = lat_.center_index();
  for (int k = 0; k < lat_.size(); ++k) {
    if (p[k] >= half) {
      lo = std::min(lo, k);
      hi = std::max(hi, k);
    }
  }
  return (hi - lo) * lat_.d_omega();
}

Eigen::ArrayXcd low_gain_g(const FrequencyLattice& lat, const GainParams& p) {
  const int n = lat.size();
  Eigen::ArrayXcd g(n);
  for (int k = 0; k < n; ++k) {
    const double u = p.kappa * lat.detunings()[k] * lat.detunings()[k] * p.z;
    const double sinc = u == 0.0 ? 1.0 : std::sin(u) / u;
    g[k] = cd(0.0, p.gamma * p.z * sinc);
  }
  return g;
}

Eigen::ArrayXd high_gain_f(const FrequencyLattice& lat, const GainParams& p) {
  if (!(p.gamma > 0.0)) throw std::invalid_argument("high_gain_f: gamma must be > 0");
  const Eigen::ArrayXd x4 = lat.detunings().square().square();
  return 0.5 * std::exp(p.gamma * p.z) *
         (-(p.kappa * p.kappa * p.z / (2.0 * p.gamma)) * x4).exp();
}

}  // namespace sqv
