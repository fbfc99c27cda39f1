#include "segtrial/stats.hpp"

#include <boost/math/distributions/beta.hpp>
#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <numbers>

#include "segtrial/errors.hpp"

namespace segtrial {

double normal_pdf(double z) {
  static const double inv_sqrt_2pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  return inv_sqrt_2pi * std::exp(-0.5 * z * z);
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z * std::numbers::sqrt2_v<double> / 2.0); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) raise(errc::domain, "normal_quantile: p must be in (0,1)");
  static const boost::math::normal_distribution<double> standard;
  return boost::math::quantile(standard, p);
}

double beta_quantile(double p, double a, double b) {
  if (!(p >= 0.0 && p <= 1.0)) raise(errc::domain, "beta_quantile: p must be in [0,1]");
  boost::math::beta_distribution<double> dist(a, b);
  return boost::math::quantile(dist, p);
}

double TruncatedGaussian::mass() const {
  return normal_cdf((hi - mu) / sigma) - normal_cdf((lo - mu) / sigma);
}

double TruncatedGaussian::inverse_cdf(double u) const {
  const double flo = normal_cdf((lo - mu) / sigma);
  const double fhi = normal_cdf((hi - mu) / sigma);
  if (!(fhi > flo)) {
    // no mass left in the window; degrade to the midpoint
    return 0.5 * (lo + hi);
  }
  double p = flo + u * (fhi - flo);
  // rounding can push p onto {0,1} when a truncation point sits far in a tail
  const double tiny = 1e-300;
  if (p <= 0.0) p = tiny;
  if (p >= 1.0) p = 1.0 - 1e-16;
  double x = mu + sigma * normal_quantile(p);
  if (x < lo) x = lo;
  if (x > hi) x = hi;
  return x;
}

}  // namespace segtrial
