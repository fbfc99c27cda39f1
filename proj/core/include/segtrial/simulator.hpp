#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "segtrial/bayes.hpp"
#include "segtrial/validation.hpp"

namespace segtrial {

/// End-of-study value generation for threshold sweeps. ln(outcome_value) is
/// drawn from Gaussian(mu, sigma) conditioned to the side of ln(threshold)
/// matching the subject's outcome flag. mu/sigma default to the with-outcome
/// baseline parameters shifted by +ln 2 (an artifact convention; trials
/// publish no end-of-study value model).
struct OutcomeValueSpec {
  double threshold;
  std::optional<double> mu;
  std::optional<double> sigma;
};

/// Synthetic trial generator under the intervention-independent-distributions
/// assumption made operational: outcome first (Bernoulli with the arm's true
/// prior), then ln(baseline) from the outcome-conditional Gaussian truncated
/// to the eligibility range — identically in both arms.
struct SimConfig {
  std::int64_t n_control = 0;
  std::int64_t n_treatment = 0;
  double true_prior_control = 0.0;
  double true_prior_treatment = 0.0;
  OutcomeModel model{};
  Range eligibility{0.0, 0.0};
  double threshold = 0.0;  // segment threshold of the comparison
  std::int64_t replicates = 1;
  std::uint64_t seed = 0;
  std::optional<OutcomeValueSpec> outcome_value;
  std::int64_t bootstrap_replicates = 0;  // 0 disables per-replicate intervals
  double bootstrap_level = 0.95;

  /// Raises errc::config naming the offending field. Truncation mass below
  /// 1e-6 in either model component is a configuration error.
  void validate() const;

  SegmentRule segment_rule() const;
  static const char* control_label() { return "control"; }
  static const char* treatment_label() { return "treatment"; }
};

/// Deterministic per (config.seed, replicate): same inputs, identical bytes.
TrialDataset generate_trial(const SimConfig& config, std::uint64_t replicate = 0);

/// One replicate of the segmental-vs-RCT comparison.
struct ReplicateRow {
  std::int64_t index = 0;
  bool ok = false;
  std::string note;
  double rct_control = 0.0;        // full-data empirical priors
  double rct_treatment = 0.0;
  double seg_count_control = 0.0;  // rearrangement, dichotomous-count ratios
  double seg_count_treatment = 0.0;
  double seg_tail_control = 0.0;   // rearrangement, fitted-model tail ratios
  double seg_tail_treatment = 0.0;
  double or_rct = 0.0;             // treatment/control odds ratios
  double or_seg_count = 0.0;
  std::optional<IntervalEstimate> ci_control;  // bootstrap, count-based
  std::optional<IntervalEstimate> ci_treatment;
  bool cover_control = false;
  bool cover_treatment = false;
};

struct EstimatorSummary {
  double mean_control = 0.0;
  double mean_treatment = 0.0;
  double bias_control = 0.0;  // mean - true prior
  double bias_treatment = 0.0;
  double rmse_control = 0.0;
  double rmse_treatment = 0.0;
};

struct ComparisonSummary {
  std::int64_t replicates = 0;
  std::int64_t failed = 0;
  EstimatorSummary rct;
  EstimatorSummary seg_count;
  EstimatorSummary seg_tail;
  double coverage_control = 0.0;  // share of successful replicates whose CI covers truth
  double coverage_treatment = 0.0;
};

struct ComparisonReport {
  SimConfig config;
  std::vector<ReplicateRow> rows;
  ComparisonSummary summary;
};

/// Generate `config.replicates` trials and compare the full-data empirical
/// priors against the segmental rearrangement estimates.
///
/// Protocol per replicate: the segment rule keeps control subjects at or
/// below the threshold and treatment subjects above it. The count-based
/// rearrangement takes each estimand's likelihood table from the OPPOSITE
/// arm's full-range counts — the assumption tested in one arm supplies the
/// ratios for the other, so the table stays a consistent estimate of the
/// arm-free stratum likelihoods whatever the arm sizes. The tail variant
/// refits the ln-value model on all records and uses its tail ratios.
///
/// Replicate failures are recorded, not fatal; more than 10% failures raise
/// errc::numeric. Rows are deterministic per (seed, replicate index) under
/// any scheduling.
ComparisonReport run_comparison(const SimConfig& config);

struct SweepEntry {
  double threshold;
  std::int64_t n_outcome;
  std::int64_t n_no_outcome;
  OutcomeModel model;
  PosteriorCurve control;
  PosteriorCurve treatment;
};

struct SweepResult {
  std::vector<SweepEntry> entries;
  std::vector<std::pair<double, std::string>> skipped;  // threshold -> reason
};

/// Re-run the whole pipeline for a family of outcome thresholds: relabel
/// outcomes as outcome_value > threshold, refit the model, re-estimate
/// priors through the segment rule, and emit a curve pair per threshold.
/// Requires subject records with outcome_value. Thresholds leaving fewer
/// than 2 subjects in an outcome stratum are skipped with a reason.
SweepResult sweep_outcome_threshold(const TrialDataset& data, std::span<const double> thresholds,
                                    const SegmentRule& rule, Grid grid);

}  // namespace segtrial
