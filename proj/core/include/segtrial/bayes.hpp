#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "segtrial/likelihood.hpp"
#include "segtrial/trial_data.hpp"

namespace segtrial {

/// Odds algebra. odds_from_prob(1) raises errc::domain (infinite odds).
double odds_from_prob(double p);
double prob_from_odds(double o);

enum class prior_method { count_based, parametric_tail };

/// Full-range outcome frequency observed for the same arm group, attached
/// for comparison when the unfiltered data covers both threshold sides.
struct ObservedPrior {
  std::int64_t events;
  std::int64_t total;
  double probability;
};

/// Arm-specific prior outcome probability recovered by the odds-form Bayes
/// rearrangement: prior odds = (segment conditional odds) / (likelihood
/// ratio of the segment's test range).
struct PriorEstimate {
  std::string group;               // "placebo", "irbesartan", ...
  ArmSet arms;
  Range segment_range;
  std::int64_t events;
  std::int64_t non_events;
  double conditional_odds;         // events / non_events within the segment
  double likelihood_ratio_used;
  double prior_odds;               // conditional_odds / likelihood_ratio_used
  double prior_probability;        // prior_odds / (1 + prior_odds)
  prior_method method;
  bool degenerate = false;         // zero-event segment: prior 0, flag raised
  std::optional<ObservedPrior> observed;
};

/// Rearrange Bayes rule for one segment. Zero events yield prior 0 with the
/// degenerate flag instead of failing (no continuity correction is applied).
PriorEstimate estimate_prior(std::int64_t events, std::int64_t non_events, double lr,
                             const std::string& group, prior_method method);

/// A pooled arm group a prior is requested for.
struct Grouping {
  std::string label;
  ArmSet arms;
};

/// Tail areas below ln(threshold) taken as given (e.g. quoted from a prior
/// fit) instead of being computed from a model.
struct TailAreas {
  double below_with;
  double below_without;
  double threshold;
};

using LikelihoodSource = std::variant<DichotomousLikelihoods, OutcomeModel, TailAreas>;

/// One PriorEstimate per requested grouping. Segment counts come from the
/// rule applied to `data`. For count_based sources the segment's side of the
/// threshold picks the ratio: below uses (1-p_high|O)/(1-p_high|N), above
/// uses p_high|O / p_high|N. For model sources the matching tail ratio is
/// used. Groupings whose segments sit on both threshold sides are rejected.
std::vector<PriorEstimate> estimate_all_priors(const TrialDataset& data, const SegmentRule& rule,
                                               const LikelihoodSource& likelihoods,
                                               prior_method method,
                                               std::span<const Grouping> groupings);

/// Posterior outcome probability for one test value:
/// 1 / (1 + (1/prior_odds) * (1/lr)), i.e. prob_from_odds(prior_odds * lr).
double posterior_probability(double prior_odds, double lr);

/// Evaluation grid: points lo, lo+step, ..., up to hi inclusive.
struct Grid {
  double lo;
  double hi;
  double step;

  std::size_t size() const;
  double value(std::size_t i) const { return lo + static_cast<double>(i) * step; }

  friend bool operator==(const Grid&, const Grid&) = default;
};

/// Outcome probability as a function of baseline test value for one arm
/// group. Points are evaluated independently so the result is identical
/// under any evaluation order.
struct PosteriorCurve {
  std::string group;
  PriorEstimate prior;
  Grid grid;
  std::vector<double> probabilities;  // one per grid point

  /// Linear interpolation between grid points; outside the grid raises
  /// errc::out_of_range.
  double probability_at(double value) const;
};

PosteriorCurve posterior_curve(const OutcomeModel& model, const PriorEstimate& prior, Grid grid);

/// Absolute risk reduction: control minus treatment probability at each grid
/// value (positive = risk reduction from treatment). Grids must be equal.
std::vector<std::pair<double, double>> arr_curve(const PosteriorCurve& control,
                                                 const PosteriorCurve& treatment);

struct EffectSummary {
  double relative_risk;  // treatment prior probability / control prior probability
  double odds_ratio;     // treatment prior odds / control prior odds
  PriorEstimate prior_control;
  PriorEstimate prior_treatment;
};

EffectSummary effect_summary(const PriorEstimate& control, const PriorEstimate& treatment);

}  // namespace segtrial
