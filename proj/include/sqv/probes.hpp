#pragma once
// Probe points, pairs and quads on the lattice. Families are pure index
// geometry; callers pick the sampling window (e.g. the |g|² support core) so
// probes land where the correlators carry signal.

#include <vector>

#include "sqv/lattice.hpp"

namespace sqv {

struct ProbePair {
  int i = 0, j = 0;
};

struct ProbeQuad {
  int a = 0, b = 0, c = 0, d = 0;
};

enum class QuadFamily { Degenerate, Ridge, Random };

// [center−span, center+span] clipped to the lattice
struct IndexWindow {
  int lo = 0, hi = 0;
};
IndexWindow centered_window(const FrequencyLattice& lat, int span);
// smallest symmetric window containing all k with weight[k] >= frac·max
IndexWindow support_window(const FrequencyLattice& lat, const Eigen::ArrayXd& weight,
                           double frac);

// n probe indices spread evenly over the window (always includes the center)
std::vector<int> spread_indices(const FrequencyLattice& lat, IndexWindow w, int n);

// Degenerate: (k,k,k,k). Ridge: (k, mirror k, k', mirror k') — the
// anticorrelated pairs ω_a+ω_b = ω_c+ω_d = 2ω0. Random: four independent
// uniform picks from the window (seeded, reproducible).
std::vector<ProbeQuad> make_quads(const FrequencyLattice& lat, QuadFamily family, int count,
                                  IndexWindow window, std::uint64_t seed);

// pairs (k, k), (k, k+1), (k, mirror k) ... spread over the window
std::vector<ProbePair> make_pairs(const FrequencyLattice& lat, int count, IndexWindow window);

}  // namespace sqv
