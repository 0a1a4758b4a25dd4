#ifndef OCCUSCORE_RNG_HPP
#define OCCUSCORE_RNG_HPP

// Reproducible random streams. The engine is std::mt19937_64, whose
// output sequence is fully specified by the standard; all variate
// transforms below are implemented here rather than with the
// implementation-defined std distributions, so results are bit-stable
// across platforms.

#include <cmath>
#include <cstdint>
#include <random>

namespace occuscore {

inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : eng_(seed) {}

  // uniform on [0, 1), 53-bit resolution
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform() < p; }

  int binomial(int n, double p) {
    int s = 0;
    for (int i = 0; i < n; ++i) s += bernoulli(p) ? 1 : 0;
    return s;
  }

  // Binomial(k, p) conditioned on being positive. Rejection when the
  // success probability theta is not too small, inverse CDF otherwise.
  int zero_truncated_binomial(int k, double p) {
    const double theta = 1.0 - std::pow(1.0 - p, k);
    if (theta >= 0.1) {
      for (;;) {
        const int y = binomial(k, p);
        if (y > 0) return y;
      }
    }
    double u = uniform() * theta;
    double pmf = 1.0;
    for (int i = 0; i < k; ++i) pmf *= 1.0 - p;  // Pr(Y=0)
    const double ratio = p / (1.0 - p);
    for (int y = 1; y < k; ++y) {
      pmf *= ratio * static_cast<double>(k - y + 1) / static_cast<double>(y);
      if (u < pmf) return y;
      u -= pmf;
    }
    return k;
  }

  // Box-Muller, no caching
  double normal() {
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
  }

 private:
  std::mt19937_64 eng_;
};

// Stable mapping from (base seed, sweep point, replicate) to a stream.
// Each coordinate passes through an avalanche mix so neighbouring
// indices give unrelated sequences.
inline RandomStream derive_stream(std::uint64_t base_seed, std::uint64_t r_index,
                                  std::uint64_t replicate) {
  std::uint64_t h = mix64(base_seed);
  h = mix64(h ^ (r_index + 0xA0761D6478BD642FULL));
  h = mix64(h ^ (replicate + 0xE7037ED1A0B428DBULL));
  return RandomStream(h);
}

}  // namespace occuscore

#endif
