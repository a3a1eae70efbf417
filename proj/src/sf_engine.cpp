#include "sqv/sf_engine.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "sqv/random.hpp"
#include "sqv/stats.hpp"

namespace sqv {

namespace {

void require_same_lattice(const FrequencyLattice& a, const FrequencyLattice& b,
                          const char* what) {
  if (a.size() != b.size() || a.d_omega() != b.d_omega() || a.omega0() != b.omega0())
    throw std::invalid_argument(std::string(what) + ": lattices differ");
}

void require_stage(const FieldEnsemble& e, EnsembleStage want, const char* what) {
  if (e.stage() != want) throw std::invalid_argument(std::string(what) + ": wrong ensemble stage");
}

void require_paired(const FieldEnsemble& a, const FieldEnsemble& b, const char* what) {
  require_same_lattice(a.lattice(), b.lattice(), what);
  if (a.spec().seed != b.spec().seed || a.spec().n_realizations != b.spec().n_realizations ||
      a.spec().p_sf != b.spec().p_sf)
    throw std::invalid_argument(std::string(what) +
                                ": ensembles do not share the same noise realizations");
}

void require_quad_in_range(const FrequencyLattice& lat, const ProbeQuad& q) {
  for (int k : {q.a, q.b, q.c, q.d})
    if (!lat.contains_index(k)) throw std::invalid_argument("probe quad index out of range");
}

}  // namespace

FieldEnsemble::FieldEnsemble(const FrequencyLattice& lat, const NoiseSpec& spec,
                             EnsembleStage stage, double gamma_z_tag)
    : lat_(lat), spec_(spec), stage_(stage), gamma_z_tag_(gamma_z_tag) {
  if (spec.n_realizations < 1)
    throw std::invalid_argument("FieldEnsemble: need at least one realization");
  if (spec.p_sf <= 0.0) throw std::invalid_argument("FieldEnsemble: p_sf must be positive");
  data_.resize(spec.n_realizations, lat.size());
}

void FieldEnsemble::save_binary(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path);
  out.write(reinterpret_cast<const char*>(data_.data()),
            static_cast<std::streamsize>(sizeof(std::complex<double>) *
                                         static_cast<std::size_t>(data_.size())));
  if (!out) throw std::runtime_error("short write to " + path);
}

void FieldEnsemble::save_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "realization";
  for (int k = 0; k < lat_.size(); ++k) out << ",re_" << k << ",im_" << k;
  out << "\n";
  char buf[32];
  for (int r = 0; r < realizations(); ++r) {
    out << r;
    for (int k = 0; k < lat_.size(); ++k) {
      const std::complex<double> v = data_(r, k);
      std::snprintf(buf, sizeof buf, ",%.16e", v.real());
      out << buf;
      std::snprintf(buf, sizeof buf, ",%.16e", v.imag());
      out << buf;
    }
    out << "\n";
  }
  if (!out) throw std::runtime_error("short write to " + path);
}

FieldEnsemble sample_vacuum(const FrequencyLattice& lat, const NoiseSpec& spec,
                            const ExecPolicy& exec) {
  FieldEnsemble out(lat, spec, EnsembleStage::Vacuum, 0.0);
  const double scale = std::sqrt(spec.p_sf * lat.delta_peak()) * M_SQRT1_2;
  const int m = lat.size();
  auto& data = out.data();
  parallel_for(static_cast<std::size_t>(spec.n_realizations), exec, [&](std::size_t r) {
    NoiseStream ns(spec.seed, r);
    for (int k = 0; k < m; ++k) data(static_cast<Eigen::Index>(r), k) = scale * ns.complex_normal_pair();
  });
  return out;
}

FieldEnsemble squeeze(const FieldEnsemble& vacuum, const GainProfile& gain,
                      const ExecPolicy& exec) {
  require_stage(vacuum, EnsembleStage::Vacuum, "squeeze");
  require_same_lattice(vacuum.lattice(), gain.lattice(), "squeeze");
  FieldEnsemble out(vacuum.lattice(), vacuum.spec(), EnsembleStage::Squeezed,
                    gain.params().gamma_z());
  const auto& f = gain.f();
  const auto& g = gain.g();
  const auto& in = vacuum.data();
  auto& data = out.data();
  parallel_for(static_cast<std::size_t>(vacuum.realizations()), exec, [&](std::size_t r) {
    const auto ri = static_cast<Eigen::Index>(r);
    const Eigen::ArrayXcd a = in.row(ri).transpose();
    data.row(ri) = (f * a + g * a.reverse().conjugate()).transpose();
  });
  return out;
}

FieldEnsemble gate(const FieldEnsemble& input, const GateKernel& kernel,
                   const ExecPolicy& exec) {
  if (input.stage() == EnsembleStage::Gated)
    throw std::invalid_argument("gate: ensemble is already gated");
  require_same_lattice(input.lattice(), kernel.lattice(), "gate");
  FieldEnsemble out(input.lattice(), input.spec(), EnsembleStage::Gated, input.gamma_z_tag());
  const auto& in = input.data();
  auto& data = out.data();
  struct Unit {};
  chunked_reduce<Unit>(
      static_cast<std::size_t>(input.realizations()), exec,
      [&](std::size_t, std::size_t b, std::size_t e) {
        GateConvolver conv = kernel.convolver();
        for (std::size_t r = b; r < e; ++r) {
          const auto ri = static_cast<Eigen::Index>(r);
          data.row(ri) = conv.apply(in.row(ri).transpose()).transpose();
        }
        return Unit{};
      },
      [](std::size_t, Unit&) {});
  return out;
}

SpectrumEstimate spectrum_sf(const FieldEnsemble& ensemble) {
  if (ensemble.stage() == EnsembleStage::Gated)
    throw std::invalid_argument("spectrum_sf: spectrum is defined on ungated ensembles");
  const Eigen::ArrayXXd sq = ensemble.data().abs2() / ensemble.lattice().delta_peak();
  SpectrumEstimate out;
  const int m = ensemble.lattice().size();
  out.values.resize(m);
  out.stderrs.resize(m);
  for (int k = 0; k < m; ++k) {
    const MeanErr me = mean_stderr(Eigen::ArrayXd(sq.col(k)));
    out.values[k] = me.mean;
    out.stderrs[k] = me.stderr_;
  }
  return out;
}

SpectrumEstimate spectrum_sf_renormalized(const FieldEnsemble& squeezed,
                                          const FieldEnsemble& vacuum) {
  require_stage(squeezed, EnsembleStage::Squeezed, "spectrum_sf_renormalized");
  require_stage(vacuum, EnsembleStage::Vacuum, "spectrum_sf_renormalized");
  require_paired(squeezed, vacuum, "spectrum_sf_renormalized");
  const Eigen::ArrayXXd diff =
      (squeezed.data().abs2() - vacuum.data().abs2()) / squeezed.lattice().delta_peak();
  SpectrumEstimate out;
  const int m = squeezed.lattice().size();
  out.values.resize(m);
  out.stderrs.resize(m);
  for (int k = 0; k < m; ++k) {
    const MeanErr me = mean_stderr(Eigen::ArrayXd(diff.col(k)));
    out.values[k] = me.mean;
    out.stderrs[k] = me.stderr_;
  }
  return out;
}

Eigen::ArrayXd spectrum_sf_closed(const GainProfile& gain, double p_sf) {
  return p_sf * (2.0 * gain.g().abs2() + 1.0);
}

Eigen::ArrayXd spectrum_sf_renormalized_closed(const GainProfile& gain, double p_sf) {
  return (2.0 * p_sf) * gain.g().abs2();
}

Corr2Result corr2_sf_closed(const GainProfile& gain, const GateKernel& kernel,
                            const std::vector<ProbePair>& pairs, double p_sf) {
  require_same_lattice(gain.lattice(), kernel.lattice(), "corr2_sf_closed");
  const auto& f = gain.f();
  const auto& g = gain.g();
  Corr2Result out;
  out.pairs = pairs;
  out.provenance = Provenance::SfClosedForm;
  out.values.resize(static_cast<Eigen::Index>(pairs.size()));
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const auto [i, j] = pairs[p];
    if (!gain.lattice().contains_index(i) || !gain.lattice().contains_index(j))
      throw std::invalid_argument("probe pair index out of range");
    out.values[static_cast<Eigen::Index>(p)] =
        p_sf * (std::conj(f[i]) * f[j] + std::conj(g[i]) * g[j]) * kernel.d_at(i - j);
  }
  return out;
}

PhotonNumber energy_sf_closed(const GainProfile& gain, const GateKernel& kernel, double p_sf) {
  require_same_lattice(gain.lattice(), kernel.lattice(), "energy_sf_closed");
  PhotonNumber out;
  out.value = kernel.duration() *
              integrate(gain.lattice(), Eigen::ArrayXd(p_sf * (2.0 * gain.g().abs2() + 1.0)));
  out.edge_ratio = gain.edge_ratio();
  out.edge_leak_warning = out.edge_ratio > 1e-6;
  return out;
}

double energy_sf_baseline(const FrequencyLattice& lat, const GateKernel& kernel, double p_sf) {
  require_same_lattice(lat, kernel.lattice(), "energy_sf_baseline");
  return kernel.duration() * integrate(lat, Eigen::ArrayXd(Eigen::ArrayXd::Constant(lat.size(), p_sf)));
}

PhotonNumber energy_sf_renormalized(const GainProfile& gain, const GateKernel& kernel,
                                    double p_sf) {
  require_same_lattice(gain.lattice(), kernel.lattice(), "energy_sf_renormalized");
  PhotonNumber out;
  // (2 p_sf)·|g|² under the integral: at p_sf = ½ the coefficient is exactly 1
  // and the sum reproduces the quantum photon number bit for bit
  const double coeff = 2.0 * p_sf;
  out.value =
      kernel.duration() * integrate(gain.lattice(), Eigen::ArrayXd(coeff * gain.g().abs2()));
  out.edge_ratio = gain.edge_ratio();
  out.edge_leak_warning = out.edge_ratio > 1e-6;
  return out;
}

Corr4Tensor corr4_sf_closed(const GainProfile& gain, const GateKernel& kernel,
                            const std::vector<ProbeQuad>& quads, double p_sf) {
  require_same_lattice(gain.lattice(), kernel.lattice(), "corr4_sf_closed");
  const auto& f = gain.f();
  const auto& g = gain.g();
  const int h2 = gain.lattice().size() - 1;
  const double fp4 = 4.0 * p_sf * p_sf;
  Corr4Tensor out;
  out.quads = quads;
  out.xi = 1;  // the stochastic field has no distinguishable-photon switch
  out.provenance = Provenance::SfClosedForm;
  const auto n = static_cast<Eigen::Index>(quads.size());
  out.values.resize(n);
  out.pair_term.resize(n);
  out.background.resize(n);
  for (Eigen::Index q = 0; q < n; ++q) {
    const ProbeQuad& t = quads[static_cast<std::size_t>(q)];
    require_quad_in_range(gain.lattice(), t);
    const std::complex<double> cor = fp4 * std::conj(g[t.a] * f[t.a]) * f[t.c] * g[t.c] *
                                     kernel.d_at(h2 - t.a - t.b) * kernel.d_at(h2 - t.d - t.c);
    const double uncor = fp4 * (std::norm(g[t.a]) + 0.5) * (std::norm(g[t.b]) + 0.5) *
                         (kernel.d_at(t.b - t.c) * kernel.d_at(t.a - t.d) +
                          kernel.d_at(t.a - t.c) * kernel.d_at(t.b - t.d));
    out.pair_term[q] = cor;
    out.background[q] = uncor;
    out.values[q] = cor + uncor;
  }
  return out;
}

Corr4Tensor corr4_sf_mc(const FieldEnsemble& gated, const std::vector<ProbeQuad>& quads) {
  require_stage(gated, EnsembleStage::Gated, "corr4_sf_mc");
  if (gated.realizations() < 2)
    throw std::invalid_argument("corr4_sf_mc: need at least 2 realizations");
  const auto& data = gated.data();
  Corr4Tensor out;
  out.quads = quads;
  out.provenance = Provenance::SfMonteCarlo;
  const auto n = static_cast<Eigen::Index>(quads.size());
  out.values.resize(n);
  out.stderrs.resize(n);
  for (Eigen::Index q = 0; q < n; ++q) {
    const ProbeQuad& t = quads[static_cast<std::size_t>(q)];
    require_quad_in_range(gated.lattice(), t);
    const Eigen::ArrayXcd m = data.col(t.a).conjugate() * data.col(t.b).conjugate() *
                              data.col(t.c) * data.col(t.d);
    const ComplexMeanErr me = mean_stderr(m);
    out.values[q] = me.mean;
    out.stderrs[q] = me.stderr_;
  }
  return out;
}

Corr4Tensor corr4_sf_mc_renormalized(const FieldEnsemble& gated,
                                     const FieldEnsemble& gated_baseline,
                                     const std::vector<ProbeQuad>& quads) {
  require_stage(gated, EnsembleStage::Gated, "corr4_sf_mc_renormalized");
  require_stage(gated_baseline, EnsembleStage::Gated, "corr4_sf_mc_renormalized");
  require_paired(gated, gated_baseline, "corr4_sf_mc_renormalized");
  if (gated_baseline.gamma_z_tag() != 0.0)
    throw std::invalid_argument("corr4_sf_mc_renormalized: baseline must be gain-free");
  if (gated.realizations() < 2)
    throw std::invalid_argument("corr4_sf_mc_renormalized: need at least 2 realizations");
  const auto& data = gated.data();
  const auto& base = gated_baseline.data();
  Corr4Tensor out;
  out.quads = quads;
  out.provenance = Provenance::SfRenormalizedMc;
  const auto n = static_cast<Eigen::Index>(quads.size());
  out.values.resize(n);
  out.stderrs.resize(n);
  for (Eigen::Index q = 0; q < n; ++q) {
    const ProbeQuad& t = quads[static_cast<std::size_t>(q)];
    require_quad_in_range(gated.lattice(), t);
    const Eigen::ArrayXcd m = data.col(t.a).conjugate() * data.col(t.b).conjugate() *
                                  data.col(t.c) * data.col(t.d) -
                              base.col(t.a).conjugate() * base.col(t.b).conjugate() *
                                  base.col(t.c) * base.col(t.d);
    const ComplexMeanErr me = mean_stderr(m);
    out.values[q] = me.mean;
    out.stderrs[q] = me.stderr_;
  }
  return out;
}

Corr4Tensor renormalize(const Corr4Tensor& value, const Corr4Tensor& baseline) {
  if (value.provenance != Provenance::SfClosedForm ||
      baseline.provenance != Provenance::SfClosedForm)
    throw std::invalid_argument(
        "renormalize: subtraction of tensors is defined for closed forms; use the paired "
        "Monte Carlo renormalizers for estimates");
  if (value.quads.size() != baseline.quads.size())
    throw std::invalid_argument("renormalize: quad lists differ");
  for (std::size_t q = 0; q < value.quads.size(); ++q) {
    const ProbeQuad& x = value.quads[q];
    const ProbeQuad& y = baseline.quads[q];
    if (x.a != y.a || x.b != y.b || x.c != y.c || x.d != y.d)
      throw std::invalid_argument("renormalize: quad lists differ");
  }
  Corr4Tensor out;
  out.quads = value.quads;
  out.xi = value.xi;
  out.provenance = Provenance::SfRenormalizedClosed;
  out.values = value.values - baseline.values;
  out.pair_term = value.pair_term - baseline.pair_term;
  out.background = value.background - baseline.background;
  return out;
}

Corr4Tensor corr4_sf_renormalized_closed(const GainProfile& gain, const GateKernel& kernel,
                                         const std::vector<ProbeQuad>& quads, double p_sf) {
  require_same_lattice(gain.lattice(), kernel.lattice(), "corr4_sf_renormalized_closed");
  const auto& f = gain.f();
  const auto& g = gain.g();
  const int h2 = gain.lattice().size() - 1;
  const double fp4 = 4.0 * p_sf * p_sf;
  Corr4Tensor out;
  out.quads = quads;
  out.xi = 1;
  out.provenance = Provenance::SfRenormalizedClosed;
  const auto n = static_cast<Eigen::Index>(quads.size());
  out.values.resize(n);
  out.pair_term.resize(n);
  out.background.resize(n);
  for (Eigen::Index q = 0; q < n; ++q) {
    const ProbeQuad& t = quads[static_cast<std::size_t>(q)];
    require_quad_in_range(gain.lattice(), t);
    const std::complex<double> cor = fp4 * std::conj(g[t.a] * f[t.a]) * f[t.c] * g[t.c] *
                                     kernel.d_at(h2 - t.a - t.b) * kernel.d_at(h2 - t.d - t.c);
    const double xa = std::norm(g[t.a]);
    const double xb = std::norm(g[t.b]);
    const double uncor = fp4 * (xa * xb + 0.5 * (xa + xb)) *
                         (kernel.d_at(t.b - t.c) * kernel.d_at(t.a - t.d) +
                          kernel.d_at(t.a - t.c) * kernel.d_at(t.b - t.d));
    out.pair_term[q] = cor;
    out.background[q] = uncor;
    out.values[q] = cor + uncor;
  }
  return out;
}

Eigen::ArrayXd corr4_cross_term(const GainProfile& gain, const GateKernel& kernel,
                                const std::vector<ProbeQuad>& quads) {
  require_same_lattice(gain.lattice(), kernel.lattice(), "corr4_cross_term");
  const auto& g = gain.g();
  Eigen::ArrayXd out(static_cast<Eigen::Index>(quads.size()));
  for (std::size_t q = 0; q < quads.size(); ++q) {
    const ProbeQuad& t = quads[q];
    require_quad_in_range(gain.lattice(), t);
    out[static_cast<Eigen::Index>(q)] =
        0.5 * (std::norm(g[t.a]) + std::norm(g[t.b])) *
        (kernel.d_at(t.b - t.c) * kernel.d_at(t.a - t.d) +
         kernel.d_at(t.a - t.c) * kernel.d_at(t.b - t.d));
  }
  return out;
}

VacuumProbeStats vacuum_probe_stats(const FrequencyLattice& lat, const NoiseSpec& spec,
                                    const std::vector<int>& probes, const ExecPolicy& exec) {
  for (int k : probes)
    if (!lat.contains_index(k)) throw std::invalid_argument("probe index out of range");
  if (spec.n_realizations < 2)
    throw std::invalid_argument("vacuum_probe_stats: need at least 2 realizations");
  const auto np = static_cast<Eigen::Index>(probes.size());
  const double scale = std::sqrt(spec.p_sf * lat.delta_peak()) * M_SQRT1_2;
  const int m = lat.size();

  struct Acc {
    Eigen::ArrayXd s1, s2;          // Σ|a|², Σ|a|⁴
    Eigen::ArrayXcd p1;             // Σ a²
    Eigen::ArrayXd p2re, p2im;      // Σ Re(a²)², Σ Im(a²)²
  };
  Acc total{Eigen::ArrayXd::Zero(np), Eigen::ArrayXd::Zero(np), Eigen::ArrayXcd::Zero(np),
            Eigen::ArrayXd::Zero(np), Eigen::ArrayXd::Zero(np)};
  chunked_reduce<Acc>(
      static_cast<std::size_t>(spec.n_realizations), exec,
      [&](std::size_t, std::size_t b, std::size_t e) {
        Acc acc{Eigen::ArrayXd::Zero(np), Eigen::ArrayXd::Zero(np), Eigen::ArrayXcd::Zero(np),
                Eigen::ArrayXd::Zero(np), Eigen::ArrayXd::Zero(np)};
        Eigen::ArrayXcd local(m);
        for (std::size_t r = b; r < e; ++r) {
          NoiseStream ns(spec.seed, r);
          for (int k = 0; k < m; ++k) local[k] = scale * ns.complex_normal_pair();
          for (Eigen::Index p = 0; p < np; ++p) {
            const std::complex<double> a = local[probes[static_cast<std::size_t>(p)]];
            const double sq = std::norm(a);
            const std::complex<double> pseudo = a * a;
            acc.s1[p] += sq;
            acc.s2[p] += sq * sq;
            acc.p1[p] += pseudo;
            acc.p2re[p] += pseudo.real() * pseudo.real();
            acc.p2im[p] += pseudo.imag() * pseudo.imag();
          }
        }
        return acc;
      },
      [&](std::size_t, Acc& part) {
        total.s1 += part.s1;
        total.s2 += part.s2;
        total.p1 += part.p1;
        total.p2re += part.p2re;
        total.p2im += part.p2im;
      });

  const int n = spec.n_realizations;
  VacuumProbeStats out;
  out.variance.resize(np);
  out.variance_stderr.resize(np);
  out.pseudo.resize(np);
  out.pseudo_stderr.resize(np);
  for (Eigen::Index p = 0; p < np; ++p) {
    const MeanErr v = mean_stderr_from_sums(total.s1[p], total.s2[p], n);
    out.variance[p] = v.mean;
    out.variance_stderr[p] = v.stderr_;
    const MeanErr pre = mean_stderr_from_sums(total.p1[p].real(), total.p2re[p], n);
    const MeanErr pim = mean_stderr_from_sums(total.p1[p].imag(), total.p2im[p], n);
    out.pseudo[p] = {pre.mean, pim.mean};
    out.pseudo_stderr[p] = std::hypot(pre.stderr_, pim.stderr_);
  }
  return out;
}

}  // namespace sqv
