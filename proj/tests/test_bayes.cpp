#include <doctest.h>

#include <cmath>
#include <vector>

#include "segtrial/bayes.hpp"
#include "segtrial/builtin.hpp"
#include "segtrial/errors.hpp"
#include "segtrial/rng.hpp"
#include "segtrial/simulator.hpp"
#include "test_util.hpp"

using namespace segtrial;
using testutil::code_of;

namespace {

std::vector<Grouping> irma2_groupings() {
  return {
      {"placebo", {Arm{irma2::placebo_label}}},
      {"irbesartan", {Arm{irma2::irb150_label}, Arm{irma2::irb300_label}}},
      {"irbesartan-150", {Arm{irma2::irb150_label}}},
      {"irbesartan-300", {Arm{irma2::irb300_label}}},
  };
}

}  // namespace

TEST_SUITE("bayes") {

TEST_CASE("odds algebra") {
  CHECK(odds_from_prob(0.5) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(prob_from_odds(0.169) == doctest::Approx(0.1445680068434559).epsilon(1e-12));
  CHECK(prob_from_odds(0.0) == 0.0);
  CHECK_THROWS_AS(odds_from_prob(1.0), error);

  RngStream rng(13);
  for (int i = 0; i < 200; ++i) {
    const double p = rng.uniform() * 0.999;
    CHECK(std::abs(prob_from_odds(odds_from_prob(p)) - p) < 1e-12);
  }
}

TEST_CASE("estimate_prior reproduces the segmental placebo row") {
  const auto lik = irma2::segmental_likelihoods();
  const double lr_low = (1.0 - lik.p_high_given_outcome()) / (1.0 - lik.p_high_given_no_outcome());
  const auto est = estimate_prior(10, 124, lr_low, "placebo", prior_method::count_based);
  CHECK(est.prior_odds == doctest::Approx(0.16959064327485380).epsilon(1e-12));
  CHECK(est.prior_probability == doctest::Approx(0.145).epsilon(1e-9));
  CHECK_FALSE(est.degenerate);
}

TEST_CASE("estimate_prior reproduces the pooled treatment row") {
  const auto lik = irma2::segmental_likelihoods();
  const double lr_high = lik.p_high_given_outcome() / lik.p_high_given_no_outcome();
  const auto est = estimate_prior(19, 93, lr_high, "irbesartan", prior_method::count_based);
  CHECK(est.prior_probability == doctest::Approx(0.0789412718637785).epsilon(1e-12));
  CHECK(est.prior_probability == doctest::Approx(0.079).epsilon(1e-2));
}

TEST_CASE("neutral likelihood ratio leaves the conditional odds untouched") {
  const auto est = estimate_prior(7, 35, 1.0, "g", prior_method::count_based);
  CHECK(est.prior_odds == doctest::Approx(est.conditional_odds).epsilon(1e-15));
}

TEST_CASE("zero events yield a degenerate zero prior with a warning flag") {
  const auto est = estimate_prior(0, 50, 0.5, "g", prior_method::count_based);
  CHECK(est.degenerate);
  CHECK(est.prior_odds == 0.0);
  CHECK(est.prior_probability == 0.0);
}

TEST_CASE("rearrangement invariants hold for random inputs") {
  RngStream rng(21);
  for (int i = 0; i < 300; ++i) {
    const std::int64_t events = static_cast<std::int64_t>(rng.uniform() * 50);
    const std::int64_t non_events = 1 + static_cast<std::int64_t>(rng.uniform() * 200);
    const double lr = 0.05 + 5.0 * rng.uniform();
    const auto est = estimate_prior(events, non_events, lr, "g", prior_method::count_based);
    CHECK(std::abs(est.prior_odds - est.conditional_odds / lr) < 1e-12);
    CHECK(std::abs(est.prior_probability - est.prior_odds / (1.0 + est.prior_odds)) < 1e-12);
    // Bayes consistency: conditioning the estimated prior back on the
    // segment's ratio returns the observed conditional probability
    const double back = prob_from_odds(est.prior_odds * lr);
    const double observed =
        static_cast<double>(events) / static_cast<double>(events + non_events);
    CHECK(std::abs(back - observed) < 1e-12);
  }
}

TEST_CASE("count-based priors reproduce the published estimates") {
  const auto d = builtin_irma2();
  const auto groupings = irma2_groupings();
  const auto priors = estimate_all_priors(d, irma2::segment_rule(), irma2::segmental_likelihoods(),
                                          prior_method::count_based, groupings);
  REQUIRE(priors.size() == 4);
  const double expected[] = {0.145, 0.079, 0.109, 0.045};
  const double frozen[] = {0.145, 0.0789412718637785, 0.1090188192008410, 0.0445366618742648};
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(std::abs(priors[i].prior_probability - expected[i]) < 0.001);
    CHECK(priors[i].prior_probability == doctest::Approx(frozen[i]).epsilon(1e-9));
  }
  CHECK(priors[0].events == 10);
  CHECK(priors[0].non_events == 124);
  CHECK(priors[1].events == 19);
  CHECK(priors[1].non_events == 93);
  CHECK(priors[2].events == 14);
  CHECK(priors[2].non_events == 48);
  CHECK(priors[3].events == 5);
  CHECK(priors[3].non_events == 45);
  REQUIRE(priors[0].observed.has_value());
  CHECK(priors[0].observed->events == 30);
  CHECK(priors[0].observed->total == 196);
  REQUIRE(priors[1].observed.has_value());
  CHECK(priors[1].observed->events == 29);
  CHECK(priors[1].observed->total == 379);
}

TEST_CASE("tail-area ratios reproduce the published parametric estimates") {
  // ratios implied by the published areas 0.360 / 0.787
  const double lr_low = 0.360 / 0.787;
  const double lr_high = (1.0 - 0.360) / (1.0 - 0.787);
  const double expected[] = {0.150, 0.064, 0.089, 0.036};
  const double frozen[] = {0.1498762140544658, 0.0636651092548020, 0.0884813957628627,
                           0.0356604721245605};
  const std::int64_t counts[][2] = {{10, 124}, {19, 93}, {14, 48}, {5, 45}};
  for (int i = 0; i < 4; ++i) {
    const double lr = i == 0 ? lr_low : lr_high;
    const auto est = estimate_prior(counts[i][0], counts[i][1], lr, "g",
                                    prior_method::parametric_tail);
    CHECK(std::abs(est.prior_probability - expected[i]) < 0.001);
    CHECK(est.prior_probability == doctest::Approx(frozen[i]).epsilon(1e-9));
  }
}

TEST_CASE("model-based tail priors stay within a percent of the published ones") {
  const auto d = builtin_irma2();
  const auto priors = estimate_all_priors(d, irma2::segment_rule(), irma2::segmental_model(),
                                          prior_method::parametric_tail, irma2_groupings());
  const double published[] = {0.150, 0.064, 0.089, 0.036};
  const double frozen[] = {0.152642385283, 0.062384374542, 0.086747689171, 0.034922088052};
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(std::abs(priors[i].prior_probability - published[i]) < 0.01);
    CHECK(priors[i].prior_probability == doctest::Approx(frozen[i]).epsilon(1e-8));
  }
}

TEST_CASE("grouping straddling the threshold is rejected") {
  const auto d = builtin_irma2();
  SegmentRule rule;
  rule.segments.push_back(Segment{Range{0.0, 120.0}, {Arm{irma2::placebo_label}}});
  CHECK(code_of([&] {
          const std::vector<Grouping> g{{"placebo", {Arm{irma2::placebo_label}}}};
          estimate_all_priors(d, rule, irma2::segmental_likelihoods(),
                              prior_method::count_based, g);
        }) == errc::boundary);
}

TEST_CASE("posterior probability formula") {
  CHECK(posterior_probability(0.169, 1.0) == doctest::Approx(0.1445680068434559).epsilon(1e-12));
  CHECK(posterior_probability(0.16959064327485380, 3.755694834111266) ==
        doctest::Approx(0.3891005903596090).epsilon(1e-9));
  CHECK(posterior_probability(0.0857070992894422, 3.755694834111266) ==
        doctest::Approx(0.2435072363460084).epsilon(1e-9));
  // equivalent odds form
  RngStream rng(31);
  for (int i = 0; i < 100; ++i) {
    const double odds = 0.01 + rng.uniform();
    const double lr = 0.05 + 5.0 * rng.uniform();
    CHECK(posterior_probability(odds, lr) ==
          doctest::Approx(1.0 / (1.0 + (1.0 / odds) * (1.0 / lr))).epsilon(1e-12));
    CHECK(posterior_probability(odds * 1.01, lr) > posterior_probability(odds, lr));
    CHECK(posterior_probability(odds, lr * 1.01) > posterior_probability(odds, lr));
  }
}

TEST_CASE("flat model gives a flat curve at the prior") {
  const GaussianParams g{4.0, 0.7, 10};
  const OutcomeModel flat{g, g};
  const auto prior = estimate_prior(10, 124, 1.0, "placebo", prior_method::count_based);
  const auto curve = posterior_curve(flat, prior, Grid{20.0, 200.0, 1.0});
  for (double p : curve.probabilities)
    CHECK(p == doctest::Approx(prior.prior_probability).epsilon(1e-12));
}

TEST_CASE("segmental placebo curve passes the published waypoints") {
  const auto lik = irma2::segmental_likelihoods();
  const double lr_low = (1.0 - lik.p_high_given_outcome()) / (1.0 - lik.p_high_given_no_outcome());
  const auto prior = estimate_prior(10, 124, lr_low, "placebo", prior_method::count_based);
  const auto curve = posterior_curve(irma2::segmental_model(), prior, Grid{20.0, 200.0, 1.0});
  REQUIRE(curve.probabilities.size() == 181);
  CHECK(curve.probability_at(40.0) == doctest::Approx(0.0450635684827568).epsilon(1e-9));
  CHECK(curve.probability_at(140.0) == doctest::Approx(0.3891005903596090).epsilon(1e-9));
}

TEST_CASE("posterior curve is monotone in the prior") {
  const auto model = irma2::segmental_model();
  const auto lo = estimate_prior(10, 124, 0.4755283648498331, "seg", prior_method::count_based);
  const auto hi = estimate_prior(30, 166, 1.0, "rct", prior_method::count_based);
  const auto curve_lo = posterior_curve(model, lo, Grid{20.0, 200.0, 1.0});
  const auto curve_hi = posterior_curve(model, hi, Grid{20.0, 200.0, 1.0});
  for (std::size_t i = 0; i < curve_lo.probabilities.size(); ++i)
    CHECK(curve_hi.probabilities[i] >= curve_lo.probabilities[i]);
}

TEST_CASE("two curves from one model keep a constant odds ratio") {
  const auto model = irma2::pooled_model();
  const auto c = estimate_prior(10, 124, 0.4755283648498331, "placebo", prior_method::count_based);
  const auto t = estimate_prior(19, 93, 2.3837123991195891, "irbesartan", prior_method::count_based);
  const auto curve_c = posterior_curve(model, c, Grid{20.0, 200.0, 1.0});
  const auto curve_t = posterior_curve(model, t, Grid{20.0, 200.0, 1.0});
  const double expected_or = t.prior_odds / c.prior_odds;
  for (std::size_t i = 0; i < curve_c.probabilities.size(); ++i) {
    const double or_i = odds_from_prob(curve_t.probabilities[i]) /
                        odds_from_prob(curve_c.probabilities[i]);
    CHECK(std::abs(or_i - expected_or) < 1e-10);
  }
}

TEST_CASE("arr curve of a curve with itself is zero") {
  const auto model = irma2::pooled_model();
  const auto prior = estimate_prior(10, 124, 0.5, "g", prior_method::count_based);
  const auto curve = posterior_curve(model, prior, Grid{20.0, 200.0, 1.0});
  for (const auto& [v, arr] : arr_curve(curve, curve)) {
    (void)v;
    CHECK(arr == 0.0);
  }
}

TEST_CASE("arr curve rejects mismatched grids") {
  const auto model = irma2::pooled_model();
  const auto prior = estimate_prior(10, 124, 0.5, "g", prior_method::count_based);
  const auto a = posterior_curve(model, prior, Grid{20.0, 200.0, 1.0});
  const auto b = posterior_curve(model, prior, Grid{20.0, 200.0, 2.0});
  CHECK(code_of([&] { arr_curve(a, b); }) == errc::grid);
}

TEST_CASE("segmental arr curve shows the published shape") {
  const auto model = irma2::pooled_model();
  const auto lik = irma2::segmental_likelihoods();
  const double lr_low = (1.0 - lik.p_high_given_outcome()) / (1.0 - lik.p_high_given_no_outcome());
  const double lr_high = lik.p_high_given_outcome() / lik.p_high_given_no_outcome();
  const auto c = estimate_prior(10, 124, lr_low, "placebo", prior_method::count_based);
  const auto t = estimate_prior(19, 93, lr_high, "irbesartan", prior_method::count_based);
  const auto arr = arr_curve(posterior_curve(model, c, Grid{20.0, 200.0, 1.0}),
                             posterior_curve(model, t, Grid{20.0, 200.0, 1.0}));

  double max_arr = 0.0, argmax = 0.0, arr20 = 0.0, arr40 = 0.0;
  for (const auto& [v, a] : arr) {
    if (a > max_arr) {
      max_arr = a;
      argmax = v;
    }
    if (v == 20.0) arr20 = a;
    if (v == 40.0) arr40 = a;
  }
  CHECK(arr20 < 0.005);
  CHECK(arr40 > 0.02);
  CHECK(arr40 < 0.035);
  CHECK(max_arr == doctest::Approx(0.1463378614570359).epsilon(1e-9));
  CHECK(argmax == 125.0);
}

TEST_CASE("effect summary on the published priors") {
  const auto lik = irma2::segmental_likelihoods();
  const double lr_low = (1.0 - lik.p_high_given_outcome()) / (1.0 - lik.p_high_given_no_outcome());
  const double lr_high = lik.p_high_given_outcome() / lik.p_high_given_no_outcome();
  const auto c = estimate_prior(10, 124, lr_low, "placebo", prior_method::count_based);
  const auto t = estimate_prior(19, 93, lr_high, "irbesartan", prior_method::count_based);
  const auto effect = effect_summary(c, t);
  CHECK(effect.relative_risk == doctest::Approx(0.5444225645777829).epsilon(1e-12));
  CHECK(effect.odds_ratio == doctest::Approx(0.5053763440860215).epsilon(1e-12));
  CHECK(std::abs(effect.relative_risk - 0.545) < 2e-3);
  CHECK(std::abs(effect.odds_ratio - 0.506) < 2e-3);
}

TEST_CASE("effect summary of equal priors is the identity") {
  const auto p = estimate_prior(10, 90, 1.0, "a", prior_method::count_based);
  const auto effect = effect_summary(p, p);
  CHECK(effect.relative_risk == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(effect.odds_ratio == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("effect summary from the full trial frequencies") {
  const auto c = estimate_prior(30, 166, 1.0, "placebo", prior_method::count_based);
  const auto t = estimate_prior(29, 350, 1.0, "irbesartan", prior_method::count_based);
  const auto effect = effect_summary(c, t);
  CHECK(effect.odds_ratio == doctest::Approx(0.4584761904761905).epsilon(1e-12));
  CHECK(std::abs(effect.odds_ratio - 0.459) < 1e-3);
}

TEST_CASE("oracle equivalence: segmental count-based priors track full-range prevalences") {
  SimConfig config;
  config.n_control = 20000;
  config.n_treatment = 20000;
  config.true_prior_control = 0.153;
  config.true_prior_treatment = 0.077;
  config.model = irma2::segmental_model();
  config.eligibility = Range{20.0, 200.0};
  config.threshold = 80.0;
  config.seed = 404;
  const auto data = generate_trial(config);
  const auto rule = config.segment_rule();

  const Arm control{SimConfig::control_label()};
  const Arm treatment{SimConfig::treatment_label()};
  const auto lik_c = empirical_dichotomous(subset_arms(data, {treatment}), 80.0);
  const auto lik_t = empirical_dichotomous(subset_arms(data, {control}), 80.0);
  const std::vector<Grouping> gc{{"control", {control}}};
  const std::vector<Grouping> gt{{"treatment", {treatment}}};
  const auto est_c =
      estimate_all_priors(data, rule, lik_c, prior_method::count_based, gc).front();
  const auto est_t =
      estimate_all_priors(data, rule, lik_t, prior_method::count_based, gt).front();

  REQUIRE(est_c.observed.has_value());
  REQUIRE(est_t.observed.has_value());
  auto se = [](double p, double n) { return std::sqrt(p * (1.0 - p) / n); };
  CHECK(std::abs(est_c.prior_probability - est_c.observed->probability) <
        3.0 * se(est_c.observed->probability, 20000.0) + 0.01);
  CHECK(std::abs(est_t.prior_probability - est_t.observed->probability) <
        3.0 * se(est_t.observed->probability, 20000.0) + 0.01);
  // and both track the configured truth
  CHECK(std::abs(est_c.prior_probability - 0.153) < 0.01);
  CHECK(std::abs(est_t.prior_probability - 0.077) < 0.01);
}

}  // TEST_SUITE
