#pragma once

#include "segtrial/likelihood.hpp"
#include "segtrial/trial_data.hpp"

namespace segtrial {

/// Published aggregates of the IRMA2 trial (irbesartan vs placebo in
/// hypertensive type-2 diabetics with persistent micro-albuminuria; outcome
/// is nephropathy, i.e. AER > 200 ug/min, at 24 months): 5 baseline-AER
/// bands x 3 arms, eligibility 20-200 ug/min.
TrialDataset builtin_irma2();

namespace irma2 {

inline const char* placebo_label = "placebo";
inline const char* irb150_label = "irbesartan-150";
inline const char* irb300_label = "irbesartan-300";
inline const char* pooled_treatment_label = "irbesartan";

constexpr double segment_threshold = 80.0;

/// The segmental allocation the trial data is re-analysed under:
/// AER <= 80 served by placebo, AER > 80 by either irbesartan dose.
SegmentRule segment_rule();

/// Published dichotomous likelihood table of the segmental re-analysis
/// (P(AER > 80 | outcome) = 19/29, P(AER > 80 | no outcome) = 47/171).
/// These counts come from the trial's subject-level data and are carried
/// as data: the non-event cell is not derivable from the aggregate bins.
DichotomousLikelihoods segmental_likelihoods();

/// ln(AER) summary statistics published for the segmental subset
/// (placebo <= 80 pooled with irbesartan > 80).
OutcomeModel segmental_model();

/// ln(AER) summary statistics published for both arms pooled over the full
/// eligibility range. Its with-outcome spread (0.45 vs 0.42) makes it the
/// default for probability-curve construction.
OutcomeModel pooled_model();

}  // namespace irma2

}  // namespace segtrial
