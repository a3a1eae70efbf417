#pragma once
// Splittable, reproducible noise streams.
//
// Every Monte Carlo realization r draws from its own generator seeded by
// hash(master_seed, r), so any subset of realizations can be regenerated
// independently and results do not depend on how realizations are
// partitioned across workers.
//
// mt19937_64 output is fully specified by the C++ standard; the normal
// deviates are produced by an explicit Box-Muller transform because the
// stdlib normal_distribution algorithm is implementation-defined.

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace sqv {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Seed for realization stream r under a master seed; two hash rounds so that
// neighbouring r and neighbouring master seeds decorrelate.
inline std::uint64_t stream_seed(std::uint64_t master_seed, std::uint64_t r) {
  return splitmix64(splitmix64(master_seed) ^ splitmix64(r + 0x632BE59BD9B4E019ull));
}

class NoiseStream {
 public:
  NoiseStream(std::uint64_t master_seed, std::uint64_t realization)
      : eng_(stream_seed(master_seed, realization)) {}

  // uniform in [0, 1), 53-bit resolution
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  // pair of independent standard normal deviates (Box-Muller)
  std::array<double, 2> normal_pair() {
    const double u1 = 1.0 - uniform();  // (0, 1], keeps log finite
    const double u2 = uniform();
    const double rad = std::sqrt(-2.0 * std::log(u1));
    const double ang = 2.0 * M_PI * u2;
    return {rad * std::cos(ang), rad * std::sin(ang)};
  }

  // x + iy with x, y ~ N(0,1); E|z|^2 = 2
  std::complex<double> complex_normal_pair() {
    const auto xy = normal_pair();
    return {xy[0], xy[1]};
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace sqv
