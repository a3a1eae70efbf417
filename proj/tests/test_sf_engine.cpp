#include <doctest.h>

#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <vector>

#include "sqv/sf_engine.hpp"

using namespace sqv;

namespace {

const ExecPolicy kSerial{1, 256};
const ExecPolicy kPar{4, 256};

// Exact second moments of the gated stochastic ensemble, from the window
// quadrature (no fat-delta shortcut): the independent oracle for the Monte
// Carlo estimators.
struct ExactGatedMoments {
  const FrequencyLattice& lat;
  const GainProfile& gain;
  double T, p;

  // <c*_i c_j> = P · measure Σ_ν W(i−ν) W(j−ν) (f*_ν f_ν + g*_ν g_ν)... the
  // conjugated moment only needs |f|²+|g|²
  std::complex<double> conjugated(int i, int j) const {
    std::complex<double> acc(0.0, 0.0);
    for (int v = 0; v < lat.size(); ++v) {
      const double wi = window_transform(T, (i - v) * lat.d_omega());
      const double wj = window_transform(T, (j - v) * lat.d_omega());
      acc += wi * wj * (std::norm(gain.f()[v]) + std::norm(gain.g()[v]));
    }
    return p * lat.measure() * acc;
  }
  // <c_i c_j> = P · measure Σ_ν W(i−ν) W(j−mirror(ν)) (f_ν g_mν + g_ν f_mν)
  std::complex<double> pseudo(int i, int j) const {
    std::complex<double> acc(0.0, 0.0);
    for (int v = 0; v < lat.size(); ++v) {
      const int mv = lat.mirror_index(v);
      const double wi = window_transform(T, (i - v) * lat.d_omega());
      const double wj = window_transform(T, (j - mv) * lat.d_omega());
      acc += wi * wj * (gain.f()[v] * gain.g()[mv] + gain.g()[v] * gain.f()[mv]);
    }
    return p * lat.measure() * acc;
  }
  // Gaussian (Wick) fourth moment <c*_a c*_b c_c c_d>
  std::complex<double> corr4(const ProbeQuad& q) const {
    return conjugated(q.a, q.c) * conjugated(q.b, q.d) +
           conjugated(q.a, q.d) * conjugated(q.b, q.c) +
           std::conj(pseudo(q.a, q.b)) * pseudo(q.c, q.d);
  }
};

}  // namespace

TEST_CASE("vacuum sampler calibration at probe columns") {
  const FrequencyLattice lat(2.0, 1.0, 33);
  const NoiseSpec spec{0.5, 91, 20000};
  const std::vector<int> probes{0, 8, 16, 24, 32};
  const VacuumProbeStats st = vacuum_probe_stats(lat, spec, probes, kPar);
  const double expect = spec.p_sf * lat.delta_peak();
  for (Eigen::Index k = 0; k < st.variance.size(); ++k) {
    CHECK(std::abs(st.variance[k] - expect) <= 5.0 * st.variance_stderr[k]);
    CHECK(std::abs(st.pseudo[k]) <= 5.0 * st.pseudo_stderr[k]);
  }
}

TEST_CASE("worker count does not change a sampled ensemble, bitwise") {
  const FrequencyLattice lat(2.0, 1.0, 33);
  const NoiseSpec spec{0.5, 7, 600};
  const FieldEnsemble a = sample_vacuum(lat, spec, kSerial);
  const FieldEnsemble b = sample_vacuum(lat, spec, ExecPolicy{8, 256});
  CHECK(a.data().rows() == b.data().rows());
  for (int r = 0; r < a.realizations(); ++r)
    for (int k = 0; k < lat.size(); ++k) CHECK(a.data()(r, k) == b.data()(r, k));
}

TEST_CASE("squeezed spectrum: Monte Carlo meets the closed form at the carrier") {
  const FrequencyLattice lat(2.0, 1.0, 33);
  const NoiseSpec spec{0.5, 1234, 20000};
  const GainProfile gain(lat, {1.0, 1.0, 1.0, SqueezeConvention::Unitary, false});
  const FieldEnsemble vac = sample_vacuum(lat, spec, kPar);
  const FieldEnsemble sq = squeeze(vac, gain, kPar);
  const SpectrumEstimate est = spectrum_sf(sq);
  const Eigen::ArrayXd closed = spectrum_sf_closed(gain, spec.p_sf);
  const int h = lat.center_index();
  // P(2 sinh²+1) at γz = 1, P = ½
  CHECK(closed[h] == doctest::Approx(1.88109784554181573).epsilon(1e-14));
  for (int k = 0; k < lat.size(); ++k)
    CHECK(std::abs(est.values[k] - closed[k]) <= 5.0 * est.stderrs[k]);
  // renormalized closed form is assembled under the point, not by subtraction
  const Eigen::ArrayXd ren = spectrum_sf_renormalized_closed(gain, spec.p_sf);
  CHECK(ren[h] == doctest::Approx(1.38109784554181573).epsilon(1e-14));
}

TEST_CASE("degenerate closed fourth moments: frozen values at P = 1/2") {
  const FrequencyLattice lat(1.0, 0.5, 33);
  const GainProfile gain(lat, {1.0, 1.0, 1.0, SqueezeConvention::Unitary, false});
  const GateKernel kernel(lat, 1.0);
  const int h = lat.center_index();
  const std::vector<ProbeQuad> quads{{h, h, h, h}};

  const Corr4Tensor sf = corr4_sf_closed(gain, kernel, quads, 0.5);
  CHECK(sf.pair_term[0].real() == doctest::Approx(3.28852910450206083).epsilon(1e-14));
  CHECK(sf.background[0].real() == doctest::Approx(7.07705820900412166).epsilon(1e-14));
  CHECK(sf.values[0].real() == doctest::Approx(10.3655873135061825).epsilon(1e-14));

  const Corr4Tensor ren = corr4_sf_renormalized_closed(gain, kernel, quads, 0.5);
  CHECK(ren.background[0].real() == doctest::Approx(6.57705820900412166).epsilon(1e-14));
  CHECK(ren.pair_term[0] == sf.pair_term[0]);  // pair term has no g=0 part

  const Eigen::ArrayXd cross = corr4_cross_term(gain, kernel, quads);
  CHECK(cross[0] == doctest::Approx(2.76219569108363146).epsilon(1e-14));
  // renormalized background minus quantum incoherent equals the cross term
  const Corr4Tensor qt_ref = corr4_qt(gain, kernel, quads, 1);
  CHECK(std::abs((ren.background[0] - qt_ref.background[0]).real() - cross[0]) <=
        1e-13 * cross[0]);
}

TEST_CASE("gated moments carry D-function units without stray factors") {
  // <|c|²> of gated vacuum = P·D(0) = P·T; this pins the unit bookkeeping
  // (measure·delta_peak absorbed per pairing)
  const FrequencyLattice lat(2.0, 1.0, 33);
  const NoiseSpec spec{0.5, 555, 20000};
  const GateKernel kernel(lat, 8.0);
  const FieldEnsemble vac = sample_vacuum(lat, spec, kPar);
  const FieldEnsemble gated = gate(vac, kernel, kPar);
  const int h = lat.center_index();
  double s1 = 0.0, s2 = 0.0;
  for (int r = 0; r < gated.realizations(); ++r) {
    const double v = std::norm(gated.data()(r, h));
    s1 += v;
    s2 += v * v;
  }
  const int n = gated.realizations();
  const double mean = s1 / n;
  const double se = std::sqrt(std::max(0.0, s2 / n - mean * mean) / (n - 1.0));
  // window-quadrature value of P·Σ measure·W²: equals P·T up to sinc tails
  double d0 = 0.0;
  for (int v = 0; v < lat.size(); ++v) {
    const double w = window_transform(8.0, (h - v) * lat.d_omega());
    d0 += lat.measure() * w * w;
  }
  CHECK(std::abs(mean - spec.p_sf * d0) <= 5.0 * se);
  // in-band window mass: T minus the sinc tails outside the band, which carry
  // about 2/(pi·hw) ≈ 0.64 here (T·hw = 8 is deliberately small)
  CHECK(d0 < 8.0);
  CHECK(d0 > 8.0 - 2.0 * (2.0 / M_PI));
}

TEST_CASE("Monte Carlo fourth moments close on the exact Wick value") {
  const FrequencyLattice lat(2.0, 1.0, 65);
  const NoiseSpec spec{0.5, 20240617, 20000};
  const GainProfile gain(lat, {1.0, 1.0, 1.0, SqueezeConvention::Unitary, false});
  const GateKernel kernel(lat, 8.0);
  const FieldEnsemble gated = gate(squeeze(sample_vacuum(lat, spec, kPar), gain, kPar), kernel,
                                   kPar);

  const std::vector<ProbeQuad> quads{
      {32, 32, 32, 32}, {20, 44, 26, 38}, {10, 54, 54, 10}, {30, 34, 31, 33}, {16, 48, 16, 48}};
  const Corr4Tensor mc = corr4_sf_mc(gated, quads);
  const ExactGatedMoments exact{lat, gain, 8.0, spec.p_sf};
  for (std::size_t q = 0; q < quads.size(); ++q) {
    const std::complex<double> want = exact.corr4(quads[q]);
    CHECK(std::abs(mc.values[q] - want) <= 5.0 * mc.stderrs[q]);
    CHECK(mc.stderrs[q] > 0.0);
  }
}

TEST_CASE("renormalization against the same ensemble is exactly zero") {
  const FrequencyLattice lat(2.0, 1.0, 33);
  const NoiseSpec spec{0.5, 31, 500};
  GainParams zero{0.0, 1.0, 1.0, SqueezeConvention::Unitary, false};
  const GateKernel kernel(lat, 8.0);
  const FieldEnsemble vac = sample_vacuum(lat, spec, kSerial);
  const FieldEnsemble gated0 = gate(squeeze(vac, GainProfile(lat, zero), kSerial), kernel,
                                    kSerial);
  const std::vector<ProbeQuad> quads{{1, 2, 3, 4}, {16, 16, 16, 16}};
  const Corr4Tensor diff = corr4_sf_mc_renormalized(gated0, gated0, quads);
  for (Eigen::Index q = 0; q < diff.values.size(); ++q) {
    CHECK(diff.values[q] == std::complex<double>(0.0, 0.0));
    CHECK(diff.stderrs[q] == 0.0);
  }
}

TEST_CASE("generic renormalize subtracts tensors term by term") {
  const FrequencyLattice lat(2.0, 1.0, 33);
  const GainProfile gain(lat, {1.0, 1.0, 1.0, SqueezeConvention::Unitary, false});
  GainParams zp{0.0, 1.0, 1.0, SqueezeConvention::Unitary, false};
  const GainProfile zero(lat, zp);
  const GateKernel kernel(lat, 8.0);
  const std::vector<ProbeQuad> quads{{16, 16, 16, 16}, {8, 24, 12, 20}};
  const Corr4Tensor a = corr4_sf_closed(gain, kernel, quads, 0.5);
  const Corr4Tensor b = corr4_sf_closed(zero, kernel, quads, 0.5);
  const Corr4Tensor diff = renormalize(a, b);
  const Corr4Tensor direct = corr4_sf_renormalized_closed(gain, kernel, quads, 0.5);
  // the subtraction path agrees to rounding; the direct path is the one with
  // full precision in the small-gain tail
  for (Eigen::Index q = 0; q < diff.values.size(); ++q)
    CHECK(std::abs(diff.values[q] - direct.values[q]) <= 1e-10 * std::abs(direct.values[q]));
  CHECK(diff.provenance == Provenance::SfRenormalizedClosed);
}

TEST_CASE("closed gated energy: renormalized equals the quantum photon number") {
  const FrequencyLattice lat(6.0, 5.0, 129);
  const GateKernel kernel(lat, 20.0);
  for (double gz : {1e-2, 1.0, 5.0}) {
    const GainProfile gain(lat, {gz, 1.0, 1.0, SqueezeConvention::Unitary, false});
    const PhotonNumber qt = photon_number_qt(gain, kernel);
    const PhotonNumber ren = energy_sf_renormalized(gain, kernel, 0.5);
    CHECK(std::abs(ren.value - qt.value) <= 1e-12 * qt.value);
    // un-renormalized energy keeps the vacuum pedestal T·∫đω P
    const PhotonNumber raw = energy_sf_closed(gain, kernel, 0.5);
    const double pedestal = energy_sf_baseline(lat, kernel, 0.5);
    CHECK(raw.value == doctest::Approx(ren.value + pedestal).epsilon(1e-12));
  }
}

TEST_CASE("ensemble stage bookkeeping is enforced") {
  const FrequencyLattice lat(2.0, 1.0, 33);
  const NoiseSpec spec{0.5, 3, 100};
  const GainProfile gain(lat, {1.0, 1.0, 1.0, SqueezeConvention::Unitary, false});
  const GateKernel kernel(lat, 8.0);
  const FieldEnsemble vac = sample_vacuum(lat, spec, kSerial);
  const FieldEnsemble sq = squeeze(vac, gain, kSerial);
  const FieldEnsemble gated = gate(sq, kernel, kSerial);
  CHECK_THROWS_AS(squeeze(sq, gain, kSerial), std::invalid_argument);       // not vacuum
  CHECK_THROWS_AS(gate(gated, kernel, kSerial), std::invalid_argument);     // already gated
  CHECK_THROWS_AS(spectrum_sf(gated), std::invalid_argument);               // gated spectrum
  CHECK_THROWS_AS(corr4_sf_mc(sq, {{0, 0, 0, 0}}), std::invalid_argument);  // not gated
}

TEST_CASE("ensemble exports: raw binary layout and CSV header") {
  namespace fs = std::filesystem;
  const FrequencyLattice lat(2.0, 1.0, 5);
  const NoiseSpec spec{0.5, 17, 3};
  const FieldEnsemble vac = sample_vacuum(lat, spec, kSerial);
  const fs::path dir = fs::temp_directory_path() / "sqv_export_test";
  fs::create_directories(dir);

  const fs::path bin = dir / "ens.bin";
  vac.save_binary(bin.string());
  CHECK(fs::file_size(bin) == std::size_t(3) * 5 * sizeof(std::complex<double>));
  std::ifstream in(bin, std::ios::binary);
  std::complex<double> first;
  in.read(reinterpret_cast<char*>(&first), sizeof first);
  CHECK(first == vac.data()(0, 0));

  const fs::path csv = dir / "ens.csv";
  vac.save_csv(csv.string());
  std::ifstream cin_(csv);
  std::string header;
  std::getline(cin_, header);
  CHECK(header.rfind("realization,re_0,im_0,", 0) == 0);
  fs::remove_all(dir);
}
