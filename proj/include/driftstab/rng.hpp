#pragma once

#include <cstdint>
#include <random>

namespace driftstab {

// Identifies one reproducible stream of random draws. The same
// (seed, stream_id) always reproduces the identical sequence bit for bit;
// distinct stream_ids give statistically independent substreams.
struct RandomStream {
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;
};

// Inverse of the standard normal CDF (Wichura's AS241 rational
// approximation, accurate to ~1e-15). u must lie in (0,1).
double normal_quantile(double u);

// Deterministic generator over a (stream, substream) pair. Gaussian draws
// use inversion, so each variate consumes exactly one 64-bit word; this is
// the fixed generation algorithm for the release.
class Rng {
 public:
  Rng(RandomStream stream, std::uint64_t substream);

  std::uint64_t next_u64() { return gen_(); }

  // Uniform on [0,1) with 53-bit resolution.
  double uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Standard normal via inversion of a uniform on (0,1).
  double gaussian() {
    const double u =
        (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    return normal_quantile(u);
  }

  // One uniform draw; true with probability p.
  bool bernoulli(double p) { return uniform01() < p; }

 private:
  std::mt19937_64 gen_;
};

}  // namespace driftstab
