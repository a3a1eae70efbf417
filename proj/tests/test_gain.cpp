#include <doctest.h>

#include <cmath>
#include <complex>
#include <stdexcept>

#include "sqv/gain.hpp"

using namespace sqv;

namespace {
FrequencyLattice small_lat() { return FrequencyLattice(1.0, 0.5, 129); }
}  // namespace

TEST_CASE("center-point coefficients are plain hyperbolics") {
  // Δk(ω0) = 0, so f = cosh(γz), g = i·sinh(γz)
  const GainProfile gain(small_lat(), {1.0, 1.0, 1.0, SqueezeConvention::Unitary, false});
  const int h = gain.lattice().center_index();
  CHECK(gain.f()[h].real() == doctest::Approx(1.54308063481524378).epsilon(1e-15));
  CHECK(gain.f()[h].imag() == 0.0);
  CHECK(gain.g()[h].real() == 0.0);
  CHECK(gain.g()[h].imag() == doctest::Approx(1.17520119364380146).epsilon(1e-15));
}

TEST_CASE("s parameter: real and oscillatory branches") {
  const auto s_uni = s_parameter(1.0, -1.0, SqueezeConvention::Unitary);
  CHECK(s_uni.real() == doctest::Approx(0.866025403784438647).epsilon(1e-15));
  CHECK(s_uni.imag() == 0.0);
  // PaperLiteral at γ = |Δk| sits exactly on the branch point
  const auto s_pl = s_parameter(1.0, -1.0, SqueezeConvention::PaperLiteral);
  CHECK(std::abs(s_pl) == 0.0);
  // beyond the branch point the PaperLiteral rate is imaginary
  const auto s_osc = s_parameter(1.0, -2.0, SqueezeConvention::PaperLiteral);
  CHECK(s_osc.real() == 0.0);
  CHECK(s_osc.imag() == doctest::Approx(std::sqrt(3.0)).epsilon(1e-15));
}

TEST_CASE("unitary convention keeps |f|^2 - |g|^2 = 1; paper-literal breaks it") {
  const FrequencyLattice lat = small_lat();
  const GainProfile uni(lat, {1.0, 1.0, 1.0, SqueezeConvention::Unitary, false});
  CHECK(uni.unitarity_defect().abs().maxCoeff() <= 1e-12);
  const GainProfile lit(lat, {1.0, 1.0, 1.0, SqueezeConvention::PaperLiteral, false});
  CHECK(lit.unitarity_defect().abs().maxCoeff() > 1e-3);
}

TEST_CASE("relative defect absorbs the cosh^2 scale at high gain") {
  const GainProfile gain(small_lat(), {5.0, 1.0, 1.0, SqueezeConvention::Unitary, false});
  // |f|² ≈ cosh²(5) ≈ 5.5e3: the raw defect floor is ~2·|f|²·eps, while the
  // scale-aware defect stays at the rounding level
  CHECK(gain.unitarity_defect_relative().abs().maxCoeff() <= 1e-12);
  CHECK(gain.unitarity_defect().abs().maxCoeff() <= 1e-11);
}

TEST_CASE("series branch agrees with libm at tiny arguments") {
  // κ = 0 makes Δk ≡ 0 and s = γ everywhere; γz = 1e-7 forces the series
  const GainProfile gain(small_lat(), {1e-7, 0.0, 1.0, SqueezeConvention::Unitary, false});
  for (int k : {0, 37, 64, 100, 128}) {
    CHECK(gain.f()[k].real() == doctest::Approx(std::cosh(1e-7)).epsilon(1e-15));
    CHECK(gain.f()[k].imag() == 0.0);
    CHECK(gain.g()[k].imag() == doctest::Approx(std::sinh(1e-7)).epsilon(1e-13));
  }
}

TEST_CASE("zero gain leaves a pure dispersion phase") {
  const GainProfile gain(small_lat(), {0.0, 1.0, 1.0, SqueezeConvention::Unitary, false});
  CHECK(gain.g().abs().maxCoeff() == 0.0);
  CHECK((gain.f().abs2() - 1.0).abs().maxCoeff() <= 1e-14);
}

TEST_CASE("low-gain asymptote: g -> i gamma z sinc(|dk| z)") {
  // PaperLiteral matches the printed asymptote; at the band edge of this
  // lattice Δk = -1, so |g| = γ·sin(1)
  const FrequencyLattice lat(2.0, 1.0, 257);
  const GainProfile gain(lat, {1e-3, 1.0, 1.0, SqueezeConvention::PaperLiteral, false});
  const Eigen::ArrayXcd ref = low_gain_g(lat, gain.params());
  const double peak = gain.g().abs().maxCoeff();
  CHECK((gain.g() - ref).abs().maxCoeff() <= 1e-4 * peak);
  CHECK(std::abs(gain.g()[0]) == doctest::Approx(8.4147098480789651e-4).epsilon(1e-6));
}

TEST_CASE("high-gain asymptote: |f| ~ (1/2) e^{gamma z} near the carrier") {
  const FrequencyLattice lat(5.0, 2.5, 513);
  const GainParams p{10.0, 1.0, 1.0, SqueezeConvention::PaperLiteral, false};
  const GainProfile gain(lat, p);
  const Eigen::ArrayXd ref = high_gain_f(lat, p);
  const int h = lat.center_index();
  CHECK(ref[h] == doctest::Approx(11013.2328974033583).epsilon(1e-12));
  // within the region where the quartic exponent (κ²z/2γ)δ⁴ stays below 1
  int checked = 0;
  for (int k = 0; k < lat.size(); ++k) {
    const double d = lat.detunings()[k];
    if ((p.kappa * p.kappa * p.z / (2.0 * p.gamma)) * d * d * d * d > 1.0) continue;
    ++checked;
    CHECK(std::abs(std::abs(gain.f()[k]) - ref[k]) <= 1e-2 * std::abs(gain.f()[h]));
  }
  CHECK(checked > 50);
}

TEST_CASE("f and g are even in the detuning, bitwise") {
  const GainProfile gain(small_lat(), {2.5, 1.0, 2.0, SqueezeConvention::Unitary, false});
  const int m = gain.lattice().size();
  for (int k = 0; k < m; ++k) {
    CHECK(gain.f()[k] == gain.f()[m - 1 - k]);
    CHECK(gain.g()[k] == gain.g()[m - 1 - k]);
  }
}

TEST_CASE("dispersion compensation flattens the f phase at low gain") {
  const FrequencyLattice lat(2.0, 1.0, 257);
  const GainProfile raw(lat, {1e-3, 1.0, 1.0, SqueezeConvention::Unitary, false});
  const GainProfile comp(lat, {1e-3, 1.0, 1.0, SqueezeConvention::Unitary, true});
  double max_phase = 0.0;
  for (int k = 0; k < lat.size(); ++k)
    max_phase = std::max(max_phase, std::abs(std::arg(comp.f()[k])));
  CHECK(max_phase <= 1e-3);
  // compensation is a pure phase on f: magnitudes and g are untouched
  CHECK((comp.f().abs() - raw.f().abs()).abs().maxCoeff() <= 1e-14);
  for (int k = 0; k < lat.size(); ++k) CHECK(comp.g()[k] == raw.g()[k]);
}

TEST_CASE("gain parameters are validated") {
  const FrequencyLattice lat = small_lat();
  CHECK_THROWS_AS(GainProfile(lat, {-1.0, 1.0, 1.0, SqueezeConvention::Unitary, false}),
                  std::invalid_argument);
  CHECK_THROWS_AS(GainProfile(lat, {1.0, -1.0, 1.0, SqueezeConvention::Unitary, false}),
                  std::invalid_argument);
  CHECK_THROWS_AS(GainProfile(lat, {1.0, 1.0, 0.0, SqueezeConvention::Unitary, false}),
                  std::invalid_argument);
}
