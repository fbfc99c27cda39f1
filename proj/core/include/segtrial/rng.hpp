#pragma once

#include <cstdint>
#include <random>

#include "segtrial/stats.hpp"

namespace segtrial {

/// Deterministic random stream keyed by (seed, stream index).
///
/// Generator: std::mt19937_64 seeded through std::seed_seq{seed, index}, so
/// replicate streams are independent of scheduling and reproducible across
/// runs of the same build. Uniforms take the top 53 bits of each output word;
/// normal and truncated-normal draws go through the inverse CDF rather than
/// std distributions, which are not pinned down by the standard.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    gen_.seed(seq);
  }

  /// Uniform draw strictly inside (0,1).
  double uniform() {
    const std::uint64_t bits = gen_() >> 11;  // 53 random bits
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
  }

  bool bernoulli(double p) { return uniform() < p; }

  std::int64_t binomial(std::int64_t n, double p) {
    std::int64_t k = 0;
    for (std::int64_t i = 0; i < n; ++i) k += bernoulli(p) ? 1 : 0;
    return k;
  }

  double normal(double mu, double sigma) { return mu + sigma * normal_quantile(uniform()); }

  double truncated_normal(const TruncatedGaussian& tg) { return tg.inverse_cdf(uniform()); }

 private:
  std::mt19937_64 gen_;
};

}  // namespace segtrial
