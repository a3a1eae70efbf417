#include <doctest.h>

#include <cmath>
#include <complex>
#include <stdexcept>

#include "sqv/gate.hpp"
#include "sqv/random.hpp"

using namespace sqv;

TEST_CASE("window transform and overlap kernel: frozen values") {
  CHECK(window_transform(2.0, 1.0) == doctest::Approx(1.68294196961579301).epsilon(1e-15));
  CHECK(overlap_kernel(2.0, 1.0) == doctest::Approx(1.68294196961579301).epsilon(1e-15));
  CHECK(window_transform(50.0, 0.0) == 50.0);  // sinc(0) handled exactly
  CHECK(overlap_kernel(7.0, 0.0) == 7.0);
  // first sinc zero at Δ = 2π/T
  CHECK(std::abs(overlap_kernel(2.0, M_PI)) <= 1e-14);
}

TEST_CASE("kernel table: D(0) = T exactly, even in the offset, Toeplitz") {
  const FrequencyLattice lat(5.0, 4.0, 129);
  const GateKernel kernel(lat, 50.0);
  CHECK(kernel.d_at(0) == 50.0);
  for (int o = 1; o < lat.size(); ++o) {
    CHECK(kernel.d_at(o) == kernel.d_at(-o));
    // table agrees with the scalar definition at the same offset
    CHECK(kernel.d_at(o) == overlap_kernel(50.0, o * lat.d_omega()));
  }
}

TEST_CASE("normalization residuals sit inside the analytic tail tolerance") {
  // T·half_width = 200: ∫đΔ D ≈ 1 and ∫đΔ D² ≈ T up to sinc tails
  const FrequencyLattice lat(5.0, 4.0, 129);
  const GateKernel kernel(lat, 50.0);
  const auto [r1, r2] = kernel.normalization_residual();
  const auto [t1, t2] = kernel.normalization_tolerance();
  CHECK(r1 <= t1);
  CHECK(r2 <= t2);
  CHECK(t1 < 0.05);        // the bounds themselves are tight at this T·width
  CHECK(t2 < 0.05 * 50.0);
}

TEST_CASE("interval sums of D^2 match direct summation and clamp") {
  const FrequencyLattice lat(2.0, 1.0, 65);
  const GateKernel kernel(lat, 8.0);
  const int m = lat.size();
  auto direct = [&](int lo, int hi) {
    double s = 0.0;
    for (int o = std::max(lo, -(m - 1)); o <= std::min(hi, m - 1); ++o)
      s += kernel.d_at(o) * kernel.d_at(o);
    return s;
  };
  for (auto [lo, hi] : {std::pair{-3, 5}, {0, 0}, {-64, 64}, {-200, 200}, {10, 3}, {60, 80}}) {
    const double want = (lo <= hi) ? direct(lo, hi) : 0.0;
    CHECK(kernel.d_sq_interval(lo, hi) ==
          doctest::Approx(want).epsilon(1e-12).scale(std::max(1.0, want)));
  }
}

TEST_CASE("direct and FFT gating agree; the convolver reuses the FFT path") {
  const FrequencyLattice lat(2.0, 1.0, 129);
  const GateKernel kernel(lat, 8.0);
  NoiseStream noise(2024, 0);
  Eigen::ArrayXcd field(lat.size());
  for (int k = 0; k < lat.size(); ++k) field[k] = noise.complex_normal_pair();

  const Eigen::ArrayXcd a = kernel.gate_direct(field);
  const Eigen::ArrayXcd b = kernel.gate_fft(field);
  const double scale = a.abs().maxCoeff();
  CHECK((a - b).abs().maxCoeff() <= 1e-10 * scale);

  GateConvolver conv = kernel.convolver();
  const Eigen::ArrayXcd c = conv.apply(field);
  CHECK((c - b).abs().maxCoeff() <= 1e-14 * scale);
  // applying twice from the same workspace is stable
  const Eigen::ArrayXcd c2 = conv.apply(field);
  for (int k = 0; k < lat.size(); ++k) CHECK(c2[k] == c[k]);
}

TEST_CASE("gating a constant field reproduces the D row sum") {
  // A_j = Σ_l measure·W((j−l)dω)·1: compare against the same quadrature done
  // by hand; W = D as functions, so this pins the gate normalization
  const FrequencyLattice lat(2.0, 1.0, 65);
  const GateKernel kernel(lat, 8.0);
  const Eigen::ArrayXcd ones = Eigen::ArrayXcd::Ones(lat.size());
  const Eigen::ArrayXcd gated = kernel.gate_direct(ones);
  const int h = lat.center_index();
  double want = 0.0;
  for (int l = 0; l < lat.size(); ++l)
    want += lat.measure() * window_transform(8.0, (h - l) * lat.d_omega());
  CHECK(gated[h].real() == doctest::Approx(want).epsilon(1e-13));
  CHECK(gated[h].imag() == 0.0);
}

TEST_CASE("coherence warning trips for short gates") {
  const FrequencyLattice lat(2.0, 1.0, 65);
  CHECK(GateKernel(lat, 8.0).coherence_warning(1.0));        // T·width = 8 < 50
  CHECK_FALSE(GateKernel(lat, 80.0).coherence_warning(1.0));  // 80 > 50
}

TEST_CASE("gate construction is validated") {
  const FrequencyLattice lat(2.0, 1.0, 65);
  CHECK_THROWS_AS(GateKernel(lat, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(GateKernel(lat, -3.0), std::invalid_argument);
  // alias guard: duration·d_omega must stay below 2π
  CHECK_THROWS_AS(GateKernel(lat, 2.0 * M_PI / lat.d_omega() + 1.0), std::invalid_argument);
}
