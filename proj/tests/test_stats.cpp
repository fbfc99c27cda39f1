#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "segtrial/errors.hpp"
#include "segtrial/rng.hpp"
#include "segtrial/stats.hpp"

using namespace segtrial;

TEST_SUITE("stats") {

TEST_CASE("normal_cdf matches the reference table within 1e-7 over |z| <= 8") {
  CHECK(normal_cdf(0.0) == 0.5);
  for (const auto& ref : oracle::cdf_table) {
    CHECK(std::abs(normal_cdf(ref.z) - ref.phi) < 1e-12);
    CHECK(std::abs(normal_cdf(-ref.z) - (1.0 - ref.phi)) < 1e-7);
  }
  // two-sided 97.5% point
  CHECK(std::abs(normal_cdf(1.959964) - 0.975) < 1e-6);
  CHECK(std::abs(normal_cdf(1.959963985) - 0.9750000000268816) < 1e-9);
}

TEST_CASE("tail area below 80 under the no-outcome fit") {
  // (ln 80 - 3.65) / 0.913
  const double z = (std::log(80.0) - 3.65) / 0.913;
  const double area = normal_cdf(z);
  CHECK(area > 0.786);
  CHECK(area < 0.790);
  CHECK(std::abs(area - 0.7886603587178578) < 1e-9);
}

TEST_CASE("normal_pdf at 0") {
  CHECK(normal_pdf(0.0) == doctest::Approx(0.3989422804014327).epsilon(1e-12));
}

TEST_CASE("normal_quantile inverts normal_cdf") {
  for (double p : {0.001, 0.025, 0.1, 0.5, 0.9, 0.975, 0.999}) {
    CHECK(normal_cdf(normal_quantile(p)) == doctest::Approx(p).epsilon(1e-10));
  }
  CHECK(normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-9));
  CHECK_THROWS_AS(normal_quantile(0.0), error);
  CHECK_THROWS_AS(normal_quantile(1.0), error);
}

TEST_CASE("truncated gaussian inverse-CDF lands in range and matches quadrature mean") {
  const TruncatedGaussian tg{3.65, 0.91, std::log(20.0), std::log(80.0)};
  RngStream rng(11);
  double sum = 0.0;
  const int n = 20000;
  double prev = -1e9;
  for (int i = 0; i < n; ++i) {
    const double x = tg.inverse_cdf(rng.uniform());
    CHECK(x >= tg.lo);
    CHECK(x <= tg.hi);
    sum += x;
  }
  // monotone in u
  CHECK(tg.inverse_cdf(0.2) < tg.inverse_cdf(0.21));
  (void)prev;
  const double mean_oracle = oracle::truncated_mean(3.65, 0.91, tg.lo, tg.hi);
  const double sd_oracle = oracle::truncated_sd(3.65, 0.91, tg.lo, tg.hi);
  const double se = sd_oracle / std::sqrt(static_cast<double>(n));
  CHECK(std::abs(sum / n - mean_oracle) < 3.0 * se);
}

TEST_CASE("rng streams are deterministic and distinct") {
  RngStream a(42, 7), b(42, 7), c(42, 8);
  bool all_equal = true;
  bool any_diff_stream = false;
  for (int i = 0; i < 100; ++i) {
    const double ua = a.uniform();
    all_equal &= ua == b.uniform();
    any_diff_stream |= ua != c.uniform();
  }
  CHECK(all_equal);
  CHECK(any_diff_stream);
}

}  // TEST_SUITE
