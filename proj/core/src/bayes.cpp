#include "segtrial/bayes.hpp"

#include <algorithm>
#include <cmath>

#include "segtrial/errors.hpp"

namespace segtrial {

double odds_from_prob(double p) {
  if (!(p >= 0.0 && p <= 1.0)) raise(errc::domain, "odds_from_prob: p must be in [0,1]");
  if (p == 1.0) raise(errc::domain, "odds_from_prob: p = 1 has infinite odds");
  return p / (1.0 - p);
}

double prob_from_odds(double o) {
  if (!(o >= 0.0)) raise(errc::domain, "prob_from_odds: odds must be >= 0");
  return o / (1.0 + o);
}

PriorEstimate estimate_prior(std::int64_t events, std::int64_t non_events, double lr,
                             const std::string& group, prior_method method) {
  if (events < 0) raise(errc::domain, "estimate_prior: events must be >= 0");
  if (non_events < 1) raise(errc::domain, "estimate_prior: non_events must be >= 1");
  if (!(lr > 0.0) || !std::isfinite(lr))
    raise(errc::numeric, "estimate_prior: likelihood ratio must be finite and > 0");

  PriorEstimate est;
  est.group = group;
  est.events = events;
  est.non_events = non_events;
  est.conditional_odds = static_cast<double>(events) / static_cast<double>(non_events);
  est.likelihood_ratio_used = lr;
  est.prior_odds = est.conditional_odds / lr;
  est.prior_probability = prob_from_odds(est.prior_odds);
  est.method = method;
  est.degenerate = events == 0;
  return est;
}

namespace {

struct SegmentCounts {
  std::int64_t events = 0;
  std::int64_t non_events = 0;
  Range hull{0.0, 0.0};
  bool any = false;
  int side = 0;  // -1 below, +1 above, 0 undecided
};

int side_of(const Range& r, double threshold) {
  if (r.hi <= threshold) return -1;
  if (r.lo >= threshold) return +1;
  return 0;
}

}  // namespace

std::vector<PriorEstimate> estimate_all_priors(const TrialDataset& data, const SegmentRule& rule,
                                               const LikelihoodSource& likelihoods,
                                               prior_method method,
                                               std::span<const Grouping> groupings) {
  const DichotomousLikelihoods* table = std::get_if<DichotomousLikelihoods>(&likelihoods);
  const TailAreas* areas = std::get_if<TailAreas>(&likelihoods);
  const OutcomeModel* model = std::get_if<OutcomeModel>(&likelihoods);
  const double threshold = table ? table->threshold : areas ? areas->threshold : 0.0;
  if (method == prior_method::count_based && !table)
    raise(errc::config, "estimate_all_priors: count_based needs a dichotomous likelihood table");
  if (method == prior_method::parametric_tail && !model && !areas)
    raise(errc::config, "estimate_all_priors: parametric_tail needs an outcome model or tail areas");

  const TrialDataset filtered = apply_segment_filter(data, rule);

  std::vector<PriorEstimate> out;
  out.reserve(groupings.size());
  for (const auto& grouping : groupings) {
    SegmentCounts counts;
    for (const auto& seg : rule.segments) {
      ArmSet matched;
      for (const auto& arm : seg.arms)
        if (arm_in_set(arm, grouping.arms)) matched.push_back(arm);
      if (matched.empty()) continue;

      int seg_side = 0;
      if (table || areas) {
        seg_side = side_of(seg.range, threshold);
        if (seg_side == 0)
          raise(errc::boundary, "segment for grouping '" + grouping.label +
                                    "' straddles the likelihood threshold");
      }

      std::int64_t ev = 0;
      std::int64_t tot = 0;
      for (const auto& r : filtered.records)
        if (seg.range.contains(r.baseline_value) && arm_in_set(r.arm, matched)) {
          tot += 1;
          ev += r.outcome ? 1 : 0;
        }
      for (const auto& b : filtered.bins)
        if (seg.range.covers(b.range) && arm_in_set(b.arm, matched)) {
          tot += b.total;
          ev += b.events;
        }
      if (tot == 0) continue;

      if (!counts.any) {
        counts.hull = seg.range;
        counts.side = seg_side;
      } else {
        if ((table || areas) && seg_side != counts.side)
          raise(errc::boundary, "grouping '" + grouping.label +
                                    "' spans segments on both sides of the threshold");
        counts.hull.lo = std::min(counts.hull.lo, seg.range.lo);
        counts.hull.hi = std::max(counts.hull.hi, seg.range.hi);
      }
      counts.any = true;
      counts.events += ev;
      counts.non_events += tot - ev;
    }
    if (!counts.any)
      raise(errc::insufficient_data,
            "grouping '" + grouping.label + "' has no subjects in any segment");
    if (counts.non_events == 0)
      raise(errc::insufficient_data,
            "grouping '" + grouping.label + "' has no non-events in its segment");

    // resolve which side of the threshold the grouping's segment sits on
    int side = counts.side;
    double split = threshold;
    if (model) {
      side = counts.hull.lo > data.eligibility.lo ? +1 : -1;
      split = side > 0 ? counts.hull.lo : counts.hull.hi;
    }

    double lr = 1.0;
    if (table) {
      const double p_o = table->p_high_given_outcome();
      const double p_n = table->p_high_given_no_outcome();
      lr = side < 0 ? (1.0 - p_o) / (1.0 - p_n) : p_o / p_n;
      if (!(lr > 0.0) || !std::isfinite(lr))
        raise(errc::numeric, "degenerate dichotomous likelihood ratio for grouping '" +
                                 grouping.label + "'");
    } else if (areas) {
      lr = side < 0 ? areas->below_with / areas->below_without
                    : (1.0 - areas->below_with) / (1.0 - areas->below_without);
    } else {
      lr = tail_likelihood_ratio(*model, split, side > 0 ? lr_side::above : lr_side::below);
    }

    PriorEstimate est = estimate_prior(counts.events, counts.non_events, lr, grouping.label, method);
    est.arms = grouping.arms;
    est.segment_range = counts.hull;

    // full-range frequency for comparison, when the unfiltered data has it
    std::int64_t full_ev = 0;
    std::int64_t full_tot = 0;
    bool saw_low = false;
    bool saw_high = false;
    for (const auto& r : data.records)
      if (arm_in_set(r.arm, grouping.arms)) {
        full_tot += 1;
        full_ev += r.outcome ? 1 : 0;
        (r.baseline_value > split ? saw_high : saw_low) = true;
      }
    for (const auto& b : data.bins)
      if (arm_in_set(b.arm, grouping.arms)) {
        full_tot += b.total;
        full_ev += b.events;
        (b.range.lo >= split ? saw_high : saw_low) = true;
      }
    if (saw_low && saw_high && full_tot > 0)
      est.observed = ObservedPrior{full_ev, full_tot,
                                   static_cast<double>(full_ev) / static_cast<double>(full_tot)};
    out.push_back(std::move(est));
  }
  return out;
}

double posterior_probability(double prior_odds, double lr) {
  if (!(prior_odds > 0.0)) raise(errc::domain, "posterior_probability: prior odds must be > 0");
  if (!(lr > 0.0)) raise(errc::domain, "posterior_probability: likelihood ratio must be > 0");
  return prob_from_odds(prior_odds * lr);
}

std::size_t Grid::size() const {
  if (!(step > 0.0) || !(hi >= lo)) raise(errc::grid, "grid needs hi >= lo and step > 0");
  return static_cast<std::size_t>(std::floor((hi - lo) / step * (1.0 + 1e-12))) + 1;
}

PosteriorCurve posterior_curve(const OutcomeModel& model, const PriorEstimate& prior, Grid grid) {
  if (!(prior.prior_odds > 0.0))
    raise(errc::domain, "posterior_curve: prior odds must be > 0 (degenerate prior)");
  PosteriorCurve curve;
  curve.group = prior.group;
  curve.prior = prior;
  curve.grid = grid;
  const std::size_t n = grid.size();
  curve.probabilities.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    curve.probabilities[i] =
        posterior_probability(prior.prior_odds, point_likelihood_ratio(model, grid.value(i)));
  return curve;
}

double PosteriorCurve::probability_at(double value) const {
  const std::size_t n = probabilities.size();
  if (n == 0) raise(errc::grid, "curve has no points");
  const double last = grid.value(n - 1);
  if (value < grid.lo || value > last + 1e-9 * std::max(1.0, std::abs(last)))
    raise(errc::out_of_range, "value " + std::to_string(value) + " outside curve grid");
  if (value >= last) return probabilities[n - 1];
  const double t = (value - grid.lo) / grid.step;
  const std::size_t i = std::min(static_cast<std::size_t>(t), n - 2);
  const double frac = t - static_cast<double>(i);
  return probabilities[i] * (1.0 - frac) + probabilities[i + 1] * frac;
}

std::vector<std::pair<double, double>> arr_curve(const PosteriorCurve& control,
                                                 const PosteriorCurve& treatment) {
  if (!(control.grid == treatment.grid))
    raise(errc::grid, "arr_curve: control and treatment grids differ");
  std::vector<std::pair<double, double>> out;
  out.reserve(control.probabilities.size());
  for (std::size_t i = 0; i < control.probabilities.size(); ++i)
    out.emplace_back(control.grid.value(i),
                     control.probabilities[i] - treatment.probabilities[i]);
  return out;
}

EffectSummary effect_summary(const PriorEstimate& control, const PriorEstimate& treatment) {
  if (!(control.prior_probability > 0.0))
    raise(errc::domain, "effect_summary: zero control prior");
  return EffectSummary{
      treatment.prior_probability / control.prior_probability,
      treatment.prior_odds / control.prior_odds,
      control,
      treatment,
  };
}

}  // namespace segtrial
