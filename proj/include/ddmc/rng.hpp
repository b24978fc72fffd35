#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace ddmc {

/// splitmix64 step; used to derive independent substream seeds from a master seed.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Deterministic seed for stream `stream` of master seed `master`.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  std::uint64_t s = master ^ (0x6a09e667f3bcc909ULL + stream * 0x9e3779b97f4a7c15ULL);
  return splitmix64(s);
}

/// Seed streams used by the experiment driver. Fixed so that runs are
/// reproducible from the single master seed in the config.
namespace seed_stream {
constexpr std::uint64_t kTruth = 1;
constexpr std::uint64_t kNoise = 2;
constexpr std::uint64_t kGlobalChain = 3;
constexpr std::uint64_t kLocalChainBase = 16;  // + subdomain index
}  // namespace seed_stream

/// mt19937_64 with explicit uniform/normal conversions.
///
/// The standard specifies the raw mt19937_64 sequence bit-exactly but leaves
/// <random> distributions implementation-defined, so draws here go through
/// our own conversions to keep traces identical across toolchains.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  /// Uniform on [0,1) with 53-bit resolution.
  double uniform01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  /// Uniform on [lo,hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Standard normal via Box-Muller; one spare value is cached.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    do {
      u1 = uniform01();
    } while (u1 <= 0.0);
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

private:
  std::mt19937_64 eng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace ddmc
