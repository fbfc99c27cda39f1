#pragma once

// Test-only oracles, independent of the library paths they check:
// quadrature moments for truncated Gaussians and a reference CDF table.

#include <cmath>
#include <functional>

namespace oracle {

/// Composite Simpson rule.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n = 2000) {
  if (n % 2 == 1) ++n;
  const double h = (b - a) / n;
  double acc = f(a) + f(b);
  for (int i = 1; i < n; ++i) acc += f(a + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
  return acc * h / 3.0;
}

inline double gauss_density(double x, double mu, double sigma) {
  const double z = (x - mu) / sigma;
  return std::exp(-0.5 * z * z) / (sigma * std::sqrt(2.0 * M_PI));
}

/// Mean of a Gaussian truncated to [a, b], by numerical integration.
inline double truncated_mean(double mu, double sigma, double a, double b) {
  const double mass =
      simpson([&](double x) { return gauss_density(x, mu, sigma); }, a, b);
  const double first =
      simpson([&](double x) { return x * gauss_density(x, mu, sigma); }, a, b);
  return first / mass;
}

/// Standard deviation of a Gaussian truncated to [a, b].
inline double truncated_sd(double mu, double sigma, double a, double b) {
  const double m = truncated_mean(mu, sigma, a, b);
  const double mass =
      simpson([&](double x) { return gauss_density(x, mu, sigma); }, a, b);
  const double second = simpson(
      [&](double x) { return (x - m) * (x - m) * gauss_density(x, mu, sigma); }, a, b);
  return std::sqrt(second / mass);
}

struct CdfRef {
  double z;
  double phi;
};

/// Reference standard normal CDF values (25-digit computation, frozen).
inline constexpr CdfRef cdf_table[] = {
    {0.0, 0.5},
    {0.5, 0.6914624612740131},
    {1.0, 0.8413447460685429},
    {1.5, 0.9331927987311419},
    {2.0, 0.9772498680518208},
    {2.5, 0.9937903346742239},
    {3.0, 0.9986501019683699},
    {4.0, 0.9999683287581669},
    {5.0, 0.9999997133484281},
    {6.0, 0.9999999990134124},
    {7.0, 0.9999999999987202},
    {8.0, 0.9999999999999994},
};

}  // namespace oracle
