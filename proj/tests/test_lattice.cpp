#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "sqv/lattice.hpp"

using namespace sqv;

TEST_CASE("three-point lattice: frozen grid and weights") {
  const FrequencyLattice lat(1.0, 0.1, 3);
  CHECK(lat.size() == 3);
  CHECK(lat.omega(0) == doctest::Approx(0.9).epsilon(1e-15));
  CHECK(lat.omega(1) == 1.0);  // carrier exactly on the grid
  CHECK(lat.omega(2) == doctest::Approx(1.1).epsilon(1e-15));
  CHECK(lat.d_omega() == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(lat.center_index() == 1);
  // measure · delta_peak == 1 up to one rounding of the separately rounded
  // factors (exact for this grid)
  CHECK(lat.measure() * lat.delta_peak() == doctest::Approx(1.0).epsilon(1e-15));
  // Σ measure over 3 points = 3·0.1/2π
  const Eigen::ArrayXd ones = Eigen::ArrayXd::Ones(3);
  CHECK(integrate(lat, ones) == doctest::Approx(0.0477464829275686).epsilon(1e-14));
}

TEST_CASE("mirror index is an exact reflection") {
  const FrequencyLattice lat(1.0, 0.5, 257);
  for (int k = 0; k < lat.size(); ++k) {
    const int m = lat.mirror_index(k);
    CHECK(lat.mirror_index(m) == k);
    // detunings are exact multiples of d_omega, so reflection is bitwise
    CHECK(lat.detunings()[k] == -lat.detunings()[m]);
  }
  CHECK(lat.mirror_index(lat.center_index()) == lat.center_index());
}

TEST_CASE("detunings are exact integer multiples of the step") {
  const FrequencyLattice lat(2.0, 1.0, 129);
  const int h = lat.center_index();
  for (int k = 0; k < lat.size(); ++k)
    CHECK(lat.detunings()[k] == (k - h) * lat.d_omega());
}

TEST_CASE("integrate converges at second order on a vanishing-boundary integrand") {
  // f(ω) = (ω−a)(b−ω) on [a,b] = [0.5,1.5]: ∫đω f = (b−a)³/6/2π = 1/(12π)
  const double exact = 0.0265258238486492226;
  auto err = [&](int n) {
    const FrequencyLattice lat(1.0, 0.5, n);
    Eigen::ArrayXd f(n);
    for (int k = 0; k < n; ++k) f[k] = (lat.omega(k) - 0.5) * (1.5 - lat.omega(k));
    return std::abs(integrate(lat, f) - exact);
  };
  const double e1 = err(65), e2 = err(129), e3 = err(257);
  // halving h divides the error by ~4
  CHECK(std::log2(e1 / e2) >= 1.9);
  CHECK(std::log2(e2 / e3) >= 1.9);
}

TEST_CASE("lattice construction rejects bad parameters") {
  CHECK_THROWS_AS(FrequencyLattice(1.0, 0.5, 256), std::invalid_argument);  // even
  CHECK_THROWS_AS(FrequencyLattice(1.0, 0.5, 1), std::invalid_argument);    // too few
  CHECK_THROWS_AS(FrequencyLattice(1.0, 0.0, 33), std::invalid_argument);   // zero width
  CHECK_THROWS_AS(FrequencyLattice(1.0, -1.0, 33), std::invalid_argument);  // negative
}

TEST_CASE("integrate checks the array length") {
  const FrequencyLattice lat(1.0, 0.5, 33);
  Eigen::ArrayXd wrong = Eigen::ArrayXd::Ones(32);
  CHECK_THROWS_AS(integrate(lat, wrong), std::invalid_argument);
}
