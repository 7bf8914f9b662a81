#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace dpspectra {

namespace detail {

// splitmix64 step; used to whiten (seed, stream) pairs before seeding the engine.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace detail

/// Seeded random stream. Distinct (seed, stream_id) pairs yield independent
/// streams; the same pair replays the same sequence. The transformations from
/// raw engine output to uniform/Gaussian/Laplace variates are implemented here
/// rather than through std:: distributions, so sequences do not depend on the
/// standard library in use.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t stream_id = 0) {
    std::uint64_t s = seed;
    std::uint64_t mixed = detail::splitmix64(s);
    s ^= 0xd1b54a32d192ed03ULL * (stream_id + 1);
    mixed ^= detail::splitmix64(s);
    engine_.seed(mixed);
  }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on (0,1), both endpoints excluded.
  double next_uniform() {
    const std::uint64_t bits = engine_() >> 11;  // top 53 bits
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
  }

  /// Uniform integer in [0, bound) by rejection; unbiased for any bound >= 1.
  std::uint64_t next_below(std::uint64_t bound) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % bound;
  }

  /// Standard normal via Box-Muller; the sine partner is cached.
  double next_gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = next_uniform();
    const double u2 = next_uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * pi_ * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

  /// Laplace with the given scale (mean 0, variance 2*scale^2), inverse CDF.
  double next_laplace(double scale) {
    const double u = next_uniform();
    return u < 0.5 ? scale * std::log(2.0 * u) : -scale * std::log(2.0 * (1.0 - u));
  }

 private:
  static constexpr double pi_ = 3.14159265358979323846;
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace dpspectra
