#include "segtrial/builtin.hpp"

#include <limits>

namespace segtrial {

TrialDataset builtin_irma2() {
  const Arm placebo{irma2::placebo_label};
  const Arm irb150{irma2::irb150_label};
  const Arm irb300{irma2::irb300_label};

  TrialDataset d;
  d.name = "irma2";
  d.eligibility = Range{20.0, 200.0};
  d.outcome_threshold = 200.0;
  d.control = placebo;

  auto band = [&d](double lo, double hi, const Arm& arm, std::int64_t events, std::int64_t total) {
    d.bins.push_back(AggregateBin{Range{lo, hi}, arm, events, total});
  };
  // nephropathy at 24 months per baseline AER band
  band(20, 40, placebo, 1, 77);
  band(20, 40, irb150, 0, 59);
  band(20, 40, irb300, 1, 68);
  band(40, 80, placebo, 9, 57);
  band(40, 80, irb150, 5, 66);
  band(40, 80, irb300, 4, 74);
  band(80, 120, placebo, 9, 32);
  band(80, 120, irb150, 7, 33);
  band(80, 120, irb300, 4, 37);
  band(120, 160, placebo, 9, 23);
  band(120, 160, irb150, 3, 16);
  band(120, 160, irb300, 0, 11);
  band(160, 200, placebo, 2, 7);
  band(160, 200, irb150, 4, 13);
  band(160, 200, irb300, 1, 2);

  d.validate();
  return d;
}

namespace irma2 {

SegmentRule segment_rule() {
  SegmentRule rule;
  rule.segments.push_back(
      Segment{Range{0.0, segment_threshold}, ArmSet{Arm{placebo_label}}});
  rule.segments.push_back(Segment{Range{segment_threshold, std::numeric_limits<double>::infinity()},
                                  ArmSet{Arm{irb150_label}, Arm{irb300_label}}});
  return rule;
}

DichotomousLikelihoods segmental_likelihoods() {
  DichotomousLikelihoods lik;
  lik.threshold = segment_threshold;
  lik.events_high = 19;
  lik.events_total = 29;
  lik.nonevents_high = 47;
  lik.nonevents_total = 171;
  return lik;
}

OutcomeModel segmental_model() {
  return OutcomeModel{GaussianParams{4.54, 0.42, 29}, GaussianParams{3.65, 0.91, 171}};
}

OutcomeModel pooled_model() {
  return OutcomeModel{GaussianParams{4.54, 0.45, 59}, GaussianParams{3.65, 0.91, 516}};
}

}  // namespace irma2

}  // namespace segtrial
