#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace macgame {

/// splitmix64 step; used only to derive well-separated stream seeds.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

/// One independent random stream, addressed by (seed, user, role). The
/// simulator gives every user its own channel / arrival / action streams, so
/// adding a user never perturbs the draws of existing ones. Sampling uses
/// explicit inverse-CDF transforms on mt19937_64 output; nothing depends on
/// standard-library distribution internals, so results are identical across
/// toolchains for a fixed seed.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t user, std::uint64_t role) {
    std::uint64_t s = seed;
    splitmix64(s);
    s ^= 0x517cc1b727220a95ull * (user + 1);
    splitmix64(s);
    s ^= 0x2545f4914f6cdd1dull * (role + 1);
    engine_.seed(splitmix64(s));
  }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Index of the pmf cell containing a uniform draw (inverse CDF).
  std::size_t sample_pmf(const std::vector<double>& pmf) {
    double u = uniform();
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < pmf.size(); ++i) {
      acc += pmf[i];
      if (u < acc) return i;
    }
    return pmf.empty() ? 0 : pmf.size() - 1;
  }

  /// Poisson(rate) by inverse CDF; exact up to the 1e-300 tail.
  int sample_poisson(double rate) {
    double u = uniform();
    double p = std::exp(-rate);
    double acc = p;
    int k = 0;
    const int cap = 64 + static_cast<int>(16.0 * rate);
    while (u >= acc && k < cap) {
      ++k;
      p *= rate / k;
      acc += p;
    }
    return k;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace macgame
