#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "segtrial/trial_data.hpp"

namespace segtrial {

/// Gaussian fitted to ln(test value): mean, sample standard deviation
/// (divisor n-1) and the sample size behind the fit.
struct GaussianParams {
  double mu;
  double sigma;
  std::int64_t n;
};

/// Outcome-conditional distributions of ln(baseline value). Both components
/// live on the same ln scale.
struct OutcomeModel {
  GaussianParams with_outcome;
  GaussianParams without_outcome;
};

/// Empirical P(value > threshold | stratum) for both outcome strata, kept as
/// exact count ratios.
struct DichotomousLikelihoods {
  double threshold;
  std::int64_t events_high = 0;
  std::int64_t events_total = 0;
  std::int64_t nonevents_high = 0;
  std::int64_t nonevents_total = 0;

  double p_high_given_outcome() const;
  double p_high_given_no_outcome() const;
};

/// Fit ln-scale Gaussian parameters to positive values.
/// Errors: fewer than 2 values -> insufficient_data; value <= 0 -> domain;
/// all values identical -> degenerate distribution (domain).
GaussianParams fit_log_gaussian(std::span<const double> values);

/// Density ratio of ln(value) under the two components ("height ratio" of
/// the fitted curves). Strictly positive for value > 0.
double point_likelihood_ratio(const OutcomeModel& model, double value);

enum class lr_side { below, above };

/// Ratio of cumulative tail areas past ln(threshold).
/// side == below: CDF_with / CDF_without; side == above: complementary tails.
/// A denominator tail below 1e-12 raises errc::numeric.
double tail_likelihood_ratio(const OutcomeModel& model, double threshold, lr_side side);

/// Count subjects above/below the threshold per outcome stratum. Works on
/// records, bins, or both; a bin straddling the threshold raises
/// errc::boundary and an empty stratum raises errc::insufficient_data.
DichotomousLikelihoods empirical_dichotomous(const TrialDataset& data, double threshold);

/// Per-group fit of one (arm-group x outcome) stratum. `params` is absent
/// when the stratum lacks subject-level records; `flagged_small` marks
/// strata with fewer than 2 subjects.
struct StratumFit {
  std::string group;
  bool outcome;
  std::int64_t n = 0;
  std::optional<GaussianParams> params;
  bool flagged_small = false;
};

/// Test of the intervention-independence assumption: within each outcome
/// stratum, fitted ln-value distributions and dichotomous likelihoods should
/// match between control and treatment.
struct IndependenceReport {
  double threshold;
  std::vector<StratumFit> fits;  // control/treatment x outcome/no-outcome
  struct GroupDichotomous {
    std::string group;
    std::optional<DichotomousLikelihoods> likelihoods;  // absent when a stratum is empty
  };
  std::vector<GroupDichotomous> dichotomous;
  std::optional<double> max_mu_gap;     // absent when fits are unavailable
  std::optional<double> max_sigma_gap;
  double max_likelihood_gap = 0.0;      // max over strata of |p_high difference|
};

/// Requires both a control and at least one treatment arm (treatment arms
/// are pooled into one group). Small strata are flagged, not fatal.
IndependenceReport check_intervention_independence(const TrialDataset& data, double threshold);

}  // namespace segtrial
