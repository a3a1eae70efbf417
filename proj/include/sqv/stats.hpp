#pragma once
// Mean / error-bar helpers. Error bars use the delete-one jackknife over
// realizations; for a plain mean this reduces to sd/sqrt(n) exactly, and the
// generic functional form handles nonlinear statistics (e.g. products of
// measured second moments) whose numerator terms are correlated.

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <stdexcept>

namespace sqv {

struct MeanErr {
  double mean = 0.0;
  double stderr_ = 0.0;
};

struct ComplexMeanErr {
  std::complex<double> mean{0.0, 0.0};
  double stderr_ = 0.0;  // sqrt(se_re^2 + se_im^2)
};

inline MeanErr mean_stderr(const Eigen::Ref<const Eigen::ArrayXd>& x) {
  const auto n = x.size();
  if (n <= 0) throw std::invalid_argument("mean_stderr: empty sample");
  const double m = x.mean();
  if (n == 1) return {m, 0.0};
  const double ss = (x - m).square().sum();
  return {m, std::sqrt(ss / (static_cast<double>(n) * static_cast<double>(n - 1)))};
}

inline ComplexMeanErr mean_stderr(const Eigen::Ref<const Eigen::ArrayXcd>& z) {
  const MeanErr re = mean_stderr(z.real());
  const MeanErr im = mean_stderr(z.imag());
  return {{re.mean, im.mean}, std::hypot(re.stderr_, im.stderr_)};
}

// Mean / stderr from streaming sums Σx and Σx² (chunk-accumulated estimators).
inline MeanErr mean_stderr_from_sums(double s1, double s2, long long n) {
  if (n <= 0) throw std::invalid_argument("mean_stderr_from_sums: empty sample");
  const double nn = static_cast<double>(n);
  const double m = s1 / nn;
  if (n == 1) return {m, 0.0};
  const double var = std::max(0.0, (s2 - s1 * s1 / nn) / (nn - 1.0));
  return {m, std::sqrt(var / nn)};
}

// Delete-one jackknife of a statistic defined on the column means of a
// per-realization component matrix (rows = realizations). `stat` maps a
// vector of component means to the statistic value.
template <class Stat>
MeanErr jackknife(const Eigen::Ref<const Eigen::ArrayXXd>& components, Stat stat) {
  const auto n = components.rows();
  if (n < 2) throw std::invalid_argument("jackknife: need at least 2 realizations");
  const Eigen::ArrayXd sums = components.colwise().sum();
  const double full = stat(Eigen::ArrayXd(sums / static_cast<double>(n)));
  Eigen::ArrayXd loo(n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const Eigen::ArrayXd m = (sums - components.row(r).transpose()) / static_cast<double>(n - 1);
    loo[r] = stat(m);
  }
  const double lm = loo.mean();
  const double var = (loo - lm).square().sum() * static_cast<double>(n - 1) / static_cast<double>(n);
  return {full, std::sqrt(var)};
}

}  // namespace sqv
