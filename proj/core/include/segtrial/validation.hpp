#pragma once

#include <cstdint>
#include <span>

#include "segtrial/bayes.hpp"

namespace segtrial {

/// Internal-validity check: over a set of subjects, the mean of the curve's
/// predicted probabilities should sit near the probability the curve's prior
/// targets.
struct CalibrationReport {
  std::int64_t n;
  double mean_posterior;
  double target_prevalence;  // the curve's prior probability
  double delta;              // mean_posterior - target_prevalence
};

/// Mean curve probability over the records' baseline values (linear
/// interpolation between grid points). Values outside the grid raise
/// errc::out_of_range; an empty record set raises errc::insufficient_data.
CalibrationReport calibration_check(const PosteriorCurve& curve,
                                    std::span<const SubjectRecord> records);

enum class interval_method { exact_binomial, bootstrap };

struct IntervalEstimate {
  double point;
  double lo;
  double hi;
  double level;
  interval_method method;
  std::int64_t replicates = 0;  // bootstrap only
  std::int64_t skipped = 0;     // degenerate resamples dropped
};

/// Clopper-Pearson exact interval through the beta-quantile
/// characterisation; point = events/total.
IntervalEstimate exact_binomial_ci(std::int64_t events, std::int64_t total, double level);

struct BootstrapSpec {
  std::int64_t replicates = 1000;  // >= 1000
  double level = 0.95;
  std::uint64_t seed = 0;
};

/// Percentile bootstrap interval for a rearrangement-derived prior.
///
/// Each replicate redraws the segment's event count binomially and, for
/// count_based, the likelihood-table counts binomially, then re-runs the
/// rearrangement. Replicates draw their streams from (seed, replicate
/// index), so the interval is deterministic and schedule-independent.
/// Replicates with zero non-events or a degenerate likelihood table are
/// skipped and counted; more than 10% skipped raises errc::numeric.
IntervalEstimate bootstrap_prior_ci(const TrialDataset& data, const SegmentRule& rule,
                                    const LikelihoodSource& likelihoods, prior_method method,
                                    const Grouping& grouping, const BootstrapSpec& spec);

}  // namespace segtrial
