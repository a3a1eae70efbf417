#include "sqv/probes.hpp"

#include <algorithm>
#include <stdexcept>

#include "sqv/random.hpp"

namespace sqv {

IndexWindow centered_window(const FrequencyLattice& lat, int span) {
  const int c = lat.center_index();
  return {std::max(0, c - span), std::min(lat.size() - 1, c + span)};
}

IndexWindow support_window(const FrequencyLattice& lat, const Eigen::ArrayXd& weight,
                           double frac) {
  if (weight.size() != lat.size())
    throw std::invalid_argument("support_window: weight size != lattice size");
  const double cut = frac * weight.maxCoeff();
  const int c = lat.center_index();
  int span = 0;
  for (int k = 0; k < lat.size(); ++k)
    if (weight[k] >= cut) span = std::max(span, std::abs(k - c));
  return centered_window(lat, span);
}

std::vector<int> spread_indices(const FrequencyLattice& lat, IndexWindow w, int n) {
  if (n < 1) throw std::invalid_argument("spread_indices: need n >= 1");
  if (w.lo < 0 || w.hi >= lat.size() || w.lo > w.hi)
    throw std::invalid_argument("spread_indices: window out of range");
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(n));
  if (n == 1) {
    out.push_back(lat.center_index());
    return out;
  }
  for (int i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(n - 1);
    out.push_back(w.lo + static_cast<int>(std::lround(t * (w.hi - w.lo))));
  }
  // ensure the carrier is probed
  out[static_cast<std::size_t>(n / 2)] = lat.center_index();
  return out;
}

std::vector<ProbeQuad> make_quads(const FrequencyLattice& lat, QuadFamily family, int count,
                                  IndexWindow window, std::uint64_t seed) {
  if (count < 1) throw std::invalid_argument("make_quads: need count >= 1");
  if (window.lo < 0 || window.hi >= lat.size() || window.lo > window.hi)
    throw std::invalid_argument("make_quads: window out of range");
  std::vector<ProbeQuad> quads;
  quads.reserve(static_cast<std::size_t>(count));
  const int width = window.hi - window.lo + 1;
  NoiseStream rng(seed, 0x71AD5);
  auto pick = [&] { return window.lo + static_cast<int>(rng.uniform() * width) % width; };
  switch (family) {
    case QuadFamily::Degenerate: {
      const auto ks = spread_indices(lat, window, count);
      for (int k : ks) quads.push_back({k, k, k, k});
      break;
    }
    case QuadFamily::Ridge: {
      // pair (k, mirror k) against (k', mirror k'); k, k' sweep the window,
      // first quad sits exactly on the carrier
      const auto ks = spread_indices(lat, window, count);
      for (int i = 0; i < count; ++i) {
        const int k = ks[static_cast<std::size_t>(i)];
        const int kp = ks[static_cast<std::size_t>((i * 7 + 3) % count)];
        quads.push_back({k, lat.mirror_index(k), kp, lat.mirror_index(kp)});
      }
      quads[0] = {lat.center_index(), lat.center_index(), lat.center_index(),
                  lat.center_index()};
      break;
    }
    case QuadFamily::Random: {
      for (int i = 0; i < count; ++i) quads.push_back({pick(), pick(), pick(), pick()});
      break;
    }
  }
  return quads;
}

std::vector<ProbePair> make_pairs(const FrequencyLattice& lat, int count, IndexWindow window) {
  const auto ks = spread_indices(lat, window, count);
  std::vector<ProbePair> pairs;
  pairs.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    const int k = ks[static_cast<std::size_t>(i)];
    switch (i % 3) {
      case 0: pairs.push_back({k, k}); break;
      case 1: pairs.push_back({k, std::min(lat.size() - 1, k + 1)}); break;
      default: pairs.push_back({k, lat.mirror_index(k)}); break;
    }
  }
  return pairs;
}

}  // namespace sqv
