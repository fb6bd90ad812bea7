#pragma once

#include <cmath>
#include <cstdint>

namespace ptscat::detail {

// SplitMix64. Realization synthesis must be bit-reproducible for a given
// seed regardless of platform or thread schedule, so the generator and the
// normal transform are pinned here instead of delegating to <random>.
struct SplitMix64 {
  std::uint64_t state;

  explicit SplitMix64(std::uint64_t seed) : state(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // uniform in (0, 1]
  double next_open_closed() {
    return 1.0 - static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  // uniform in [0, 1)
  double next_closed_open() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  // uniform in [lo, hi)
  double uniform(double lo, double hi) {
    return lo + (hi - lo) * next_closed_open();
  }
};

// Stateless mix of (master seed, stream index) -> per-stream seed.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  SplitMix64 s(master ^ (0x6a09e667f3bcc909ull + index * 0x9e3779b97f4a7c15ull));
  s.next();
  return s.next();
}

// Standard normal deviates via Box-Muller, one spare cached.
class NormalSource {
 public:
  explicit NormalSource(std::uint64_t seed) : rng_(seed) {}

  double next() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = rng_.next_open_closed();
    const double u2 = rng_.next_closed_open();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 6.283185307179586476925286766559 * u2;
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return radius * std::cos(angle);
  }

 private:
  SplitMix64 rng_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace ptscat::detail
