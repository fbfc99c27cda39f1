#pragma once

#include <cstdint>

namespace segtrial {

/// Standard normal density phi(z).
double normal_pdf(double z);

/// Standard normal CDF. Computed from std::erfc, absolute error well below
/// the 1e-7 the tail-ratio computations require.
double normal_cdf(double z);

/// Inverse standard normal CDF, p in (0,1).
double normal_quantile(double p);

/// Quantile of the Beta(a, b) distribution, p in [0,1].
double beta_quantile(double p, double a, double b);

struct TruncatedGaussian {
  double mu;
  double sigma;
  double lo;  // lower truncation point (same scale as mu)
  double hi;  // upper truncation point

  double mass() const;                 // CDF(hi) - CDF(lo)
  double inverse_cdf(double u) const;  // u in (0,1), maps into (lo, hi)
};

}  // namespace segtrial
