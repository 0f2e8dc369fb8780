#pragma once

#include <cstdint>
#include <random>

namespace mapleja::detail {

/// Seeded stream with a platform-independent mapping to [0, 1).
///
/// std::uniform_real_distribution is implementation-defined, so doubles are
/// built from the top 53 bits of mt19937_64 instead. `stream` selects an
/// independent substream (one per chunk of a parallel estimator).
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream),
                      static_cast<std::uint32_t>(stream >> 32), 0x6d61706cu};
    engine_.seed(seq);
  }

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Open interval (0, 1): inverse-CDF sampling never hits an endpoint.
  double uniform_open() {
    double u;
    do {
      u = uniform();
    } while (u == 0.0);
    return u;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace mapleja::detail
