#include "sqv/gate.hpp"

#include <unsupported/Eigen/FFT>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace sqv {

double window_transform(double duration, double delta) {
  const double x = 0.5 * delta * duration;
  if (x == 0.0) return duration;
  return duration * std::sin(x) / x;
}

double overlap_kernel(double duration, double delta) {
  return window_transform(duration, delta);
}

GateKernel::GateKernel(const FrequencyLattice& lat, double duration)
    : lat_(lat), duration_(duration) {
  if (!(duration > 0.0)) throw std::invalid_argument("gate: duration must be > 0");
  // above this the grid undersamples W and the gate quadrature aliases
  if (!(lat.d_omega() * duration < 2.0 * M_PI))
    throw std::invalid_argument("gate: need d_omega * duration < 2*pi (window unresolved)");
  const int m = lat_.size();
  table_.resize(2 * m - 1);
  sq_prefix_.resize(2 * m - 1);
  double acc = 0.0;
  for (int o = -(m - 1); o <= m - 1; ++o) {
    const double v = overlap_kernel(duration_, static_cast<double>(o) * lat_.d_omega());
    table_[o + m - 1] = v;
    acc += v * v;
    sq_prefix_[o + m - 1] = acc;
  }
}

double GateKernel::d_sq_interval(int lo, int hi) const {
  const int m = lat_.size();
  lo = std::max(lo, -(m - 1));
  hi = std::min(hi, m - 1);
  if (lo > hi) return 0.0;
  const double upper = sq_prefix_[hi + m - 1];
  const double lower = lo + m - 1 == 0 ? 0.0 : sq_prefix_[lo + m - 2];
  return upper - lower;
}

std::pair<double, double> GateKernel::normalization_residual() const {
  const double s1 = lat_.measure() * table_.sum();
  const double s2 = lat_.measure() * table_.square().sum();
  return {std::abs(s1 - 1.0), std::abs(s2 - duration_)};
}

std::pair<double, double> GateKernel::normalization_tolerance() const {
  // tails of ∫đΔ T sinc(ΔT/2) and ∫đΔ T² sinc²(ΔT/2) beyond the tabulated
  // half-range H: |tail₁| ≤ 8/(π H T), |tail₂| ≤ 4/(π H); doubled per contract
  const double H = static_cast<double>(lat_.size() - 1) * lat_.d_omega();
  return {2.0 * 8.0 / (M_PI * H * duration_), 2.0 * 4.0 / (M_PI * H)};
}

Eigen::ArrayXcd GateKernel::gate_direct(const Eigen::Ref<const Eigen::ArrayXcd>& field) const {
  const int m = lat_.size();
  if (field.size() != m) throw std::invalid_argument("gate: field size != lattice size");
  Eigen::ArrayXcd out(m);
  for (int j = 0; j < m; ++j) {
    std::complex<double> acc(0.0, 0.0);
    for (int l = 0; l < m; ++l) acc += table_[j - l + m - 1] * field[l];
    out[j] = lat_.measure() * acc;
  }
  return out;
}

struct GateConvolver::Impl {
  int m = 0;
  int n = 0;  // padded FFT length
  double measure = 0.0;
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> kernel_spec, in, spec;
};

GateConvolver::GateConvolver(const GateKernel& kernel) : impl_(std::make_unique<Impl>()) {
  const int m = kernel.lat_.size();
  int n = 1;
  while (n < 3 * m - 2) n <<= 1;
  impl_->m = m;
  impl_->n = n;
  impl_->measure = kernel.lat_.measure();
  std::vector<std::complex<double>> ker(n, {0.0, 0.0});
  for (int o = 0; o < 2 * m - 1; ++o) ker[o] = kernel.table_[o];
  impl_->kernel_spec.resize(n);
  impl_->fft.fwd(impl_->kernel_spec, ker);
  impl_->in.assign(n, {0.0, 0.0});
  impl_->spec.resize(n);
}

GateConvolver::~GateConvolver() = default;
GateConvolver::GateConvolver(GateConvolver&&) noexcept = default;

Eigen::ArrayXcd GateConvolver::apply(const Eigen::Ref<const Eigen::ArrayXcd>& field) {
  auto& s = *impl_;
  if (field.size() != s.m) throw std::invalid_argument("gate: field size != lattice size");
  std::fill(s.in.begin(), s.in.end(), std::complex<double>(0.0, 0.0));
  for (int l = 0; l < s.m; ++l) s.in[l] = field[l];
  s.fft.fwd(s.spec, s.in);
  for (int k = 0; k < s.n; ++k) s.spec[k] *= s.kernel_spec[k];
  s.fft.inv(s.in, s.spec);
  Eigen::ArrayXcd out(s.m);
  // linear convolution index j + (m−1) recovers Σ_l W(j−l)·a_l
  for (int j = 0; j < s.m; ++j) out[j] = s.measure * s.in[j + s.m - 1];
  return out;
}

Eigen::ArrayXcd GateKernel::gate_fft(const Eigen::Ref<const Eigen::ArrayXcd>& field) const {
  GateConvolver conv(*this);
  return conv.apply(field);
}

GateConvolver GateKernel::convolver() const { return GateConvolver(*this); }

}  // namespace sqv
