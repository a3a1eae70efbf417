#include "sqv/qt_engine.hpp"

#include <stdexcept>

namespace sqv {

namespace {
void require_same_lattice(const GainProfile& gain, const GateKernel& kernel) {
  if (gain.lattice().size() != kernel.lattice().size() ||
      gain.lattice().d_omega() != kernel.lattice().d_omega() ||
      gain.lattice().omega0() != kernel.lattice().omega0())
    throw std::invalid_argument("gain profile and gate kernel use different lattices");
}
void require_quad_in_range(const FrequencyLattice& lat, const ProbeQuad& q) {
  for (int k : {q.a, q.b, q.c, q.d})
    if (!lat.contains_index(k)) throw std::invalid_argument("probe quad index out of range");
}
}  // namespace

Eigen::ArrayXd spectrum_qt(const GainProfile& gain) { return gain.g().abs2(); }

Corr2Result corr2_qt(const GainProfile& gain, const GateKernel& kernel,
                     const std::vector<ProbePair>& pairs) {
  require_same_lattice(gain, kernel);
  const auto& g = gain.g();
  Corr2Result out;
  out.pairs = pairs;
  out.provenance = Provenance::QtClosedForm;
  out.values.resize(static_cast<Eigen::Index>(pairs.size()));
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const auto [i, j] = pairs[p];
    if (!gain.lattice().contains_index(i) || !gain.lattice().contains_index(j))
      throw std::invalid_argument("probe pair index out of range");
    out.values[static_cast<Eigen::Index>(p)] = std::conj(g[i]) * g[j] * kernel.d_at(i - j);
  }
  return out;
}

PhotonNumber photon_number_qt(const GainProfile& gain, const GateKernel& kernel) {
  require_same_lattice(gain, kernel);
  PhotonNumber out;
  out.value = kernel.duration() * integrate(gain.lattice(), Eigen::ArrayXd(gain.g().abs2()));
  out.edge_ratio = gain.edge_ratio();
  out.edge_leak_warning = out.edge_ratio > 1e-6;
  return out;
}

Corr4Tensor corr4_qt(const GainProfile& gain, const GateKernel& kernel,
                     const std::vector<ProbeQuad>& quads, int xi) {
  require_same_lattice(gain, kernel);
  if (xi != 0 && xi != 1) throw std::invalid_argument("corr4: xi must be 0 or 1");
  const auto& f = gain.f();
  const auto& g = gain.g();
  const int h2 = gain.lattice().size() - 1;  // 2h, offset of the sum-frequency ridge
  Corr4Tensor out;
  out.quads = quads;
  out.xi = xi;
  out.provenance = Provenance::QtClosedForm;
  const auto n = static_cast<Eigen::Index>(quads.size());
  out.values.resize(n);
  out.pair_term.resize(n);
  out.background.resize(n);
  for (Eigen::Index q = 0; q < n; ++q) {
    const ProbeQuad& t = quads[static_cast<std::size_t>(q)];
    require_quad_in_range(gain.lattice(), t);
    const std::complex<double> coh = std::conj(g[t.a] * f[t.a]) * f[t.c] * g[t.c] *
                                     kernel.d_at(h2 - t.a - t.b) * kernel.d_at(h2 - t.d - t.c);
    const double incoh =
        std::norm(g[t.a]) * std::norm(g[t.b]) *
        (kernel.d_at(t.b - t.c) * kernel.d_at(t.a - t.d) +
         static_cast<double>(xi) * kernel.d_at(t.a - t.c) * kernel.d_at(t.b - t.d));
    out.pair_term[q] = coh;
    out.background[q] = incoh;
    out.values[q] = coh + incoh;
  }
  return out;
}

}  // namespace sqv
