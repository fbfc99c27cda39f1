#include <doctest.h>

#include <cmath>
#include <vector>

#include "segtrial/builtin.hpp"
#include "segtrial/errors.hpp"
#include "segtrial/reconstruct.hpp"
#include "segtrial/simulator.hpp"
#include "segtrial/validation.hpp"
#include "test_util.hpp"

using namespace segtrial;
using testutil::code_of;

namespace {

PosteriorCurve segmental_placebo_curve(const OutcomeModel& model, Grid grid) {
  const auto lik = irma2::segmental_likelihoods();
  const double lr_low = (1.0 - lik.p_high_given_outcome()) / (1.0 - lik.p_high_given_no_outcome());
  const auto prior = estimate_prior(10, 124, lr_low, "placebo", prior_method::count_based);
  return posterior_curve(model, prior, grid);
}

SimConfig wide_config(std::int64_t n, std::uint64_t seed) {
  SimConfig config;
  config.n_control = n;
  config.n_treatment = 0;
  config.true_prior_control = 0.145;
  config.true_prior_treatment = 0.0;
  config.model = irma2::segmental_model();
  config.eligibility = Range{0.5, 20000.0};  // negligible truncation
  config.threshold = 80.0;
  config.seed = seed;
  return config;
}

}  // namespace

TEST_SUITE("validation") {

TEST_CASE("calibration of a flat curve returns the prior exactly") {
  const GaussianParams g{4.0, 0.7, 10};
  const OutcomeModel flat{g, g};
  const auto prior = estimate_prior(10, 124, 1.0, "g", prior_method::count_based);
  const auto curve = posterior_curve(flat, prior, Grid{10.0, 300.0, 1.0});
  std::vector<SubjectRecord> records;
  for (double v : {12.0, 47.5, 80.0, 211.0}) records.push_back({v, Arm{"g"}, false, {}});
  const auto report = calibration_check(curve, records);
  CHECK(report.n == 4);
  CHECK(report.mean_posterior == doctest::Approx(prior.prior_probability).epsilon(1e-12));
  CHECK(report.delta == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("calibration against the curve's own generative model converges") {
  const auto model = irma2::segmental_model();
  double deltas[3] = {0, 0, 0};
  const std::int64_t sizes[3] = {1000, 10000, 100000};
  for (int i = 0; i < 3; ++i) {
    auto config = wide_config(sizes[i], 555 + i);
    const auto data = generate_trial(config);
    const auto prior = estimate_prior(29, 171, 1.0, "control", prior_method::count_based);
    // prior 29/200 = 0.145 matches the generator's true prior
    const auto curve = posterior_curve(model, prior, Grid{0.5, 20001.0, 1.0});
    deltas[i] = std::abs(calibration_check(curve, data.records).delta);
  }
  CHECK(deltas[2] < 0.01);
  CHECK(deltas[2] < deltas[0] + 0.005);
}

TEST_CASE("calibration flags out-of-grid records") {
  const auto curve = segmental_placebo_curve(irma2::segmental_model(), Grid{20.0, 200.0, 1.0});
  std::vector<SubjectRecord> records{{500.0, Arm{"placebo"}, false, {}}};
  CHECK(code_of([&] { calibration_check(curve, records); }) == errc::out_of_range);
  CHECK(code_of([&] {
          calibration_check(curve, std::vector<SubjectRecord>{});
        }) == errc::insufficient_data);
}

TEST_CASE("reconstructed no-outcome subjects average near the published 0.156") {
  const auto d = builtin_irma2();
  const auto model = irma2::segmental_model();
  const auto records =
      reconstruct_records_from_bins(d.bins, reconstruct_strategy::model_conditional, &model, 7);
  std::vector<SubjectRecord> no_outcome;
  for (const auto& r : records)
    if (!r.outcome) no_outcome.push_back(r);
  REQUIRE(no_outcome.size() == 516);
  const auto curve = segmental_placebo_curve(model, Grid{20.0, 200.0, 1.0});
  const auto report = calibration_check(curve, no_outcome);
  CHECK(report.mean_posterior > 0.14);
  CHECK(report.mean_posterior < 0.17);
  CHECK(report.target_prevalence == doctest::Approx(0.145).epsilon(1e-9));
}

TEST_CASE("exact binomial interval closed forms") {
  const auto zero = exact_binomial_ci(0, 10, 0.95);
  CHECK(zero.lo == 0.0);
  CHECK(zero.hi == doctest::Approx(1.0 - std::pow(0.025, 0.1)).epsilon(1e-10));
  CHECK(zero.hi == doctest::Approx(0.3085).epsilon(1e-3));

  const auto full = exact_binomial_ci(196, 196, 0.95);
  CHECK(full.hi == 1.0);
  CHECK(full.lo == doctest::Approx(std::pow(0.025, 1.0 / 196.0)).epsilon(1e-10));
  CHECK(full.lo == doctest::Approx(0.9814).epsilon(1e-3));
}

TEST_CASE("exact binomial interval for the placebo prevalence") {
  const auto ci = exact_binomial_ci(30, 196, 0.95);
  CHECK(ci.point == doctest::Approx(30.0 / 196.0).epsilon(1e-15));
  CHECK(std::abs(ci.lo - 0.106) < 0.003);
  CHECK(std::abs(ci.hi - 0.211) < 0.003);
  // published limits 0.107 / 0.213 sit inside a 0.003 window of ours
  CHECK(std::abs(ci.lo - 0.107) < 0.003);
  CHECK(std::abs(ci.hi - 0.213) < 0.003);
}

TEST_CASE("exact binomial interval is equivariant under complement") {
  const std::int64_t cases[][2] = {{0, 10}, {3, 17}, {30, 196}, {59, 575}, {196, 196}};
  for (const auto& c : cases) {
    const auto a = exact_binomial_ci(c[0], c[1], 0.95);
    const auto b = exact_binomial_ci(c[1] - c[0], c[1], 0.95);
    CHECK(a.lo == doctest::Approx(1.0 - b.hi).epsilon(1e-10));
    CHECK(a.hi == doctest::Approx(1.0 - b.lo).epsilon(1e-10));
  }
}

TEST_CASE("interval width shrinks with the sample at a fixed ratio") {
  double last_width = 1.0;
  for (std::int64_t scale : {1, 10, 100, 1000}) {
    const auto ci = exact_binomial_ci(3 * scale, 10 * scale, 0.95);
    const double width = ci.hi - ci.lo;
    CHECK(width <= last_width);
    last_width = width;
  }
}

TEST_CASE("bootstrap interval brackets the segmental placebo estimate") {
  const auto d = builtin_irma2();
  const Grouping placebo{"placebo", {Arm{irma2::placebo_label}}};
  BootstrapSpec spec{4000, 0.95, 99};

  SUBCASE("likelihood table from the full aggregate counts") {
    const auto lik = empirical_dichotomous(d, 80.0);  // 39/59, 135/516
    const auto ci = bootstrap_prior_ci(d, irma2::segment_rule(), lik,
                                       prior_method::count_based, placebo, spec);
    CHECK(ci.lo <= ci.point);
    CHECK(ci.point <= ci.hi);
    CHECK(ci.lo <= 0.145);
    CHECK(0.145 <= ci.hi);
    // width comparable to the published limits (0.077, 0.245)
    CHECK(std::abs(ci.lo - 0.077) < 0.03);
    CHECK(std::abs(ci.hi - 0.245) < 0.03);
  }

  SUBCASE("likelihood table from the published segmental counts") {
    const auto ci = bootstrap_prior_ci(d, irma2::segment_rule(), irma2::segmental_likelihoods(),
                                       prior_method::count_based, placebo, spec);
    CHECK(ci.point == doctest::Approx(0.145).epsilon(1e-6));
    CHECK(ci.lo <= 0.145);
    CHECK(0.145 <= ci.hi);
    CHECK(ci.lo > 0.02);
    CHECK(ci.hi < 0.35);
  }

  SUBCASE("same seed and replicate count reproduce the interval exactly") {
    const auto a = bootstrap_prior_ci(d, irma2::segment_rule(), irma2::segmental_likelihoods(),
                                      prior_method::count_based, placebo, spec);
    const auto b = bootstrap_prior_ci(d, irma2::segment_rule(), irma2::segmental_likelihoods(),
                                      prior_method::count_based, placebo, spec);
    CHECK(a.lo == b.lo);
    CHECK(a.hi == b.hi);
    spec.seed = 100;
    const auto c = bootstrap_prior_ci(d, irma2::segment_rule(), irma2::segmental_likelihoods(),
                                      prior_method::count_based, placebo, spec);
    CHECK((c.lo != a.lo || c.hi != a.hi));
  }
}

TEST_CASE("parametric-tail bootstrap resamples only the segment counts") {
  const auto d = builtin_irma2();
  const Grouping placebo{"placebo", {Arm{irma2::placebo_label}}};
  const BootstrapSpec spec{2000, 0.95, 7};
  const auto ci = bootstrap_prior_ci(d, irma2::segment_rule(), irma2::segmental_model(),
                                     prior_method::parametric_tail, placebo, spec);
  CHECK(ci.lo <= ci.point);
  CHECK(ci.point <= ci.hi);
  CHECK(ci.skipped == 0);
}

TEST_CASE("unstable bootstrap raises after too many degenerate replicates") {
  TrialDataset d;
  d.name = "tiny";
  d.control = Arm{"c"};
  d.eligibility = Range{1.0, 200.0};
  d.bins.push_back({Range{1.0, 80.0}, Arm{"c"}, 5, 20});
  SegmentRule rule;
  rule.segments.push_back(Segment{Range{0.5, 80.0}, {Arm{"c"}}});
  DichotomousLikelihoods lik;
  lik.threshold = 80.0;
  lik.events_high = 1;
  lik.events_total = 2;  // resampled p_high|O hits 1 a quarter of the time
  lik.nonevents_high = 1;
  lik.nonevents_total = 4;
  const Grouping g{"c", {Arm{"c"}}};
  CHECK(code_of([&] {
          bootstrap_prior_ci(d, rule, lik, prior_method::count_based, g,
                             BootstrapSpec{1000, 0.95, 1});
        }) == errc::numeric);
}

TEST_CASE("bootstrap rejects too few replicates") {
  const auto d = builtin_irma2();
  const Grouping placebo{"placebo", {Arm{irma2::placebo_label}}};
  CHECK(code_of([&] {
          bootstrap_prior_ci(d, irma2::segment_rule(), irma2::segmental_likelihoods(),
                             prior_method::count_based, placebo, BootstrapSpec{100, 0.95, 1});
        }) == errc::config);
}

}  // TEST_SUITE
