#include "segtrial/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <thread>

#include "segtrial/errors.hpp"
#include "segtrial/rng.hpp"
#include "segtrial/stats.hpp"

namespace segtrial {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_prior(double p, const char* field) {
  if (!(p >= 0.0 && p < 1.0))
    raise(errc::config, std::string(field) + ": prior must be in [0,1), got " + std::to_string(p));
}

}  // namespace

void SimConfig::validate() const {
  if (n_control < 0) raise(errc::config, "n_control: must be >= 0");
  if (n_treatment < 0) raise(errc::config, "n_treatment: must be >= 0");
  if (n_control + n_treatment < 1) raise(errc::config, "n_control+n_treatment: need at least one subject");
  check_prior(true_prior_control, "true_prior_control");
  check_prior(true_prior_treatment, "true_prior_treatment");
  if (!(model.with_outcome.sigma > 0.0)) raise(errc::config, "model.with.sigma: must be > 0");
  if (!(model.without_outcome.sigma > 0.0)) raise(errc::config, "model.without.sigma: must be > 0");
  if (!(eligibility.lo > 0.0) || !(eligibility.hi > eligibility.lo))
    raise(errc::config, "eligibility: need 0 < lo < hi");
  if (!(threshold > eligibility.lo) || !(threshold < eligibility.hi))
    raise(errc::config, "threshold: must lie strictly inside the eligibility range");
  if (replicates < 1) raise(errc::config, "replicates: must be >= 1");
  const double a = std::log(eligibility.lo);
  const double b = std::log(eligibility.hi);
  const TruncatedGaussian tw{model.with_outcome.mu, model.with_outcome.sigma, a, b};
  const TruncatedGaussian tn{model.without_outcome.mu, model.without_outcome.sigma, a, b};
  if (tw.mass() < 1e-6) raise(errc::config, "model.with: truncation mass below 1e-6");
  if (tn.mass() < 1e-6) raise(errc::config, "model.without: truncation mass below 1e-6");
  if (outcome_value) {
    if (!(outcome_value->threshold > 0.0)) raise(errc::config, "outcome_value.threshold: must be > 0");
    if (outcome_value->sigma && !(*outcome_value->sigma > 0.0))
      raise(errc::config, "outcome_value.sigma: must be > 0");
  }
  if (bootstrap_replicates < 0) raise(errc::config, "bootstrap_replicates: must be >= 0");
  if (bootstrap_replicates > 0 && bootstrap_replicates < 1000)
    raise(errc::config, "bootstrap_replicates: need 0 or >= 1000");
  if (!(bootstrap_level > 0.0 && bootstrap_level < 1.0))
    raise(errc::config, "bootstrap_level: must be in (0,1)");
}

SegmentRule SimConfig::segment_rule() const {
  SegmentRule rule;
  rule.segments.push_back(Segment{Range{0.0, threshold}, {Arm{control_label()}}});
  rule.segments.push_back(Segment{Range{threshold, kInf}, {Arm{treatment_label()}}});
  return rule;
}

TrialDataset generate_trial(const SimConfig& config, std::uint64_t replicate) {
  config.validate();
  RngStream rng(config.seed, replicate);

  const double a = std::log(config.eligibility.lo);
  const double b = std::log(config.eligibility.hi);
  const TruncatedGaussian with{config.model.with_outcome.mu, config.model.with_outcome.sigma, a, b};
  const TruncatedGaussian without{config.model.without_outcome.mu,
                                  config.model.without_outcome.sigma, a, b};

  double ov_mu = config.model.with_outcome.mu + std::log(2.0);
  double ov_sigma = config.model.with_outcome.sigma;
  double ov_ln_threshold = 0.0;
  if (config.outcome_value) {
    if (config.outcome_value->mu) ov_mu = *config.outcome_value->mu;
    if (config.outcome_value->sigma) ov_sigma = *config.outcome_value->sigma;
    ov_ln_threshold = std::log(config.outcome_value->threshold);
  }

  TrialDataset data;
  data.name = "sim";
  data.eligibility = config.eligibility;
  data.control = Arm{SimConfig::control_label()};
  if (config.outcome_value) data.outcome_threshold = config.outcome_value->threshold;
  data.records.reserve(static_cast<std::size_t>(config.n_control + config.n_treatment));

  auto emit_arm = [&](const Arm& arm, std::int64_t n, double prior) {
    for (std::int64_t i = 0; i < n; ++i) {
      SubjectRecord rec;
      rec.arm = arm;
      rec.outcome = rng.bernoulli(prior);
      rec.baseline_value = std::exp(rng.truncated_normal(rec.outcome ? with : without));
      if (config.outcome_value) {
        const TruncatedGaussian tail{ov_mu, ov_sigma, rec.outcome ? ov_ln_threshold : -kInf,
                                     rec.outcome ? kInf : ov_ln_threshold};
        rec.outcome_value = std::exp(rng.truncated_normal(tail));
      }
      data.records.push_back(std::move(rec));
    }
  };
  emit_arm(data.control, config.n_control, config.true_prior_control);
  emit_arm(Arm{SimConfig::treatment_label()}, config.n_treatment, config.true_prior_treatment);

  data.validate();
  return data;
}

namespace {

struct ArmCounts {
  std::int64_t events = 0;
  std::int64_t total = 0;
};

ArmCounts count_arm(const TrialDataset& data, const Arm& arm) {
  ArmCounts c;
  for (const auto& r : data.records)
    if (r.arm == arm) {
      c.total += 1;
      c.events += r.outcome ? 1 : 0;
    }
  return c;
}

OutcomeModel fit_model_from_records(const TrialDataset& data) {
  std::vector<double> with_values;
  std::vector<double> without_values;
  for (const auto& r : data.records) (r.outcome ? with_values : without_values).push_back(r.baseline_value);
  return OutcomeModel{fit_log_gaussian(with_values), fit_log_gaussian(without_values)};
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t replicate) {
  return seed ^ (0x9E3779B97F4A7C15ULL * (replicate + 1));
}

// boundary where two segments of the rule meet
double segment_split(const SegmentRule& rule) {
  for (const auto& a : rule.segments)
    for (const auto& b : rule.segments)
      if (a.range.hi == b.range.lo) return a.range.hi;
  raise(errc::config, "segment rule has no common boundary");
}

ReplicateRow run_replicate(const SimConfig& config, std::int64_t index) {
  ReplicateRow row;
  row.index = index;
  try {
    const TrialDataset data = generate_trial(config, static_cast<std::uint64_t>(index));
    const Arm control{SimConfig::control_label()};
    const Arm treatment{SimConfig::treatment_label()};
    const SegmentRule rule = config.segment_rule();

    const ArmCounts cc = count_arm(data, control);
    const ArmCounts ct = count_arm(data, treatment);
    if (cc.events == 0 || ct.events == 0 || cc.events == cc.total || ct.events == ct.total)
      raise(errc::insufficient_data, "replicate has a degenerate arm prevalence");
    row.rct_control = static_cast<double>(cc.events) / static_cast<double>(cc.total);
    row.rct_treatment = static_cast<double>(ct.events) / static_cast<double>(ct.total);
    row.or_rct = odds_from_prob(row.rct_treatment) / odds_from_prob(row.rct_control);

    // likelihood table for each estimand from the opposite arm's full range
    const DichotomousLikelihoods lik_for_control =
        empirical_dichotomous(subset_arms(data, {treatment}), config.threshold);
    const DichotomousLikelihoods lik_for_treatment =
        empirical_dichotomous(subset_arms(data, {control}), config.threshold);

    const Grouping g_control{SimConfig::control_label(), {control}};
    const Grouping g_treatment{SimConfig::treatment_label(), {treatment}};
    const std::vector<Grouping> gc{g_control};
    const std::vector<Grouping> gt{g_treatment};

    const PriorEstimate count_c =
        estimate_all_priors(data, rule, lik_for_control, prior_method::count_based, gc).front();
    const PriorEstimate count_t =
        estimate_all_priors(data, rule, lik_for_treatment, prior_method::count_based, gt).front();
    row.seg_count_control = count_c.prior_probability;
    row.seg_count_treatment = count_t.prior_probability;
    row.or_seg_count = count_t.prior_odds / count_c.prior_odds;

    const OutcomeModel fitted = fit_model_from_records(data);
    const PriorEstimate tail_c =
        estimate_all_priors(data, rule, fitted, prior_method::parametric_tail, gc).front();
    const PriorEstimate tail_t =
        estimate_all_priors(data, rule, fitted, prior_method::parametric_tail, gt).front();
    row.seg_tail_control = tail_c.prior_probability;
    row.seg_tail_treatment = tail_t.prior_probability;

    if (config.bootstrap_replicates > 0) {
      BootstrapSpec spec{config.bootstrap_replicates, config.bootstrap_level,
                         mix_seed(config.seed, static_cast<std::uint64_t>(index))};
      row.ci_control = bootstrap_prior_ci(data, rule, lik_for_control, prior_method::count_based,
                                          g_control, spec);
      spec.seed = mix_seed(spec.seed, 0x5bd1e995ULL);
      row.ci_treatment = bootstrap_prior_ci(data, rule, lik_for_treatment,
                                            prior_method::count_based, g_treatment, spec);
      row.cover_control = row.ci_control->lo <= config.true_prior_control &&
                          config.true_prior_control <= row.ci_control->hi;
      row.cover_treatment = row.ci_treatment->lo <= config.true_prior_treatment &&
                            config.true_prior_treatment <= row.ci_treatment->hi;
    }
    row.ok = true;
  } catch (const error& e) {
    row.ok = false;
    row.note = e.what();
  }
  return row;
}

}  // namespace

ComparisonReport run_comparison(const SimConfig& config) {
  config.validate();
  if (!(config.true_prior_control > 0.0) || !(config.true_prior_treatment > 0.0))
    raise(errc::config, "true_prior_control/true_prior_treatment: comparison needs priors in (0,1)");

  ComparisonReport report;
  report.config = config;
  report.rows.resize(static_cast<std::size_t>(config.replicates));

  // replicate streams are keyed by (seed, index): any schedule, same rows
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const std::int64_t n = config.replicates;
  const std::int64_t workers = std::min<std::int64_t>(hw, n);
  std::vector<std::future<void>> futures;
  futures.reserve(static_cast<std::size_t>(workers));
  for (std::int64_t w = 0; w < workers; ++w) {
    futures.push_back(std::async(std::launch::async, [&config, &report, w, workers, n] {
      for (std::int64_t i = w; i < n; i += workers)
        report.rows[static_cast<std::size_t>(i)] = run_replicate(config, i);
    }));
  }
  for (auto& f : futures) f.get();

  // summarise in index order
  ComparisonSummary& s = report.summary;
  s.replicates = config.replicates;
  auto accumulate = [&](auto proj_c, auto proj_t, EstimatorSummary& out) {
    double sum_c = 0.0, sum_t = 0.0, ss_c = 0.0, ss_t = 0.0;
    std::int64_t m = 0;
    for (const auto& row : report.rows) {
      if (!row.ok) continue;
      const double pc = proj_c(row);
      const double pt = proj_t(row);
      sum_c += pc;
      sum_t += pt;
      ss_c += (pc - config.true_prior_control) * (pc - config.true_prior_control);
      ss_t += (pt - config.true_prior_treatment) * (pt - config.true_prior_treatment);
      ++m;
    }
    if (m == 0) return;
    out.mean_control = sum_c / static_cast<double>(m);
    out.mean_treatment = sum_t / static_cast<double>(m);
    out.bias_control = out.mean_control - config.true_prior_control;
    out.bias_treatment = out.mean_treatment - config.true_prior_treatment;
    out.rmse_control = std::sqrt(ss_c / static_cast<double>(m));
    out.rmse_treatment = std::sqrt(ss_t / static_cast<double>(m));
  };
  accumulate([](const ReplicateRow& r) { return r.rct_control; },
             [](const ReplicateRow& r) { return r.rct_treatment; }, s.rct);
  accumulate([](const ReplicateRow& r) { return r.seg_count_control; },
             [](const ReplicateRow& r) { return r.seg_count_treatment; }, s.seg_count);
  accumulate([](const ReplicateRow& r) { return r.seg_tail_control; },
             [](const ReplicateRow& r) { return r.seg_tail_treatment; }, s.seg_tail);

  std::int64_t ok_count = 0;
  std::int64_t cover_c = 0, cover_t = 0, with_ci = 0;
  for (const auto& row : report.rows) {
    if (!row.ok) {
      ++s.failed;
      continue;
    }
    ++ok_count;
    if (row.ci_control) {
      ++with_ci;
      cover_c += row.cover_control ? 1 : 0;
      cover_t += row.cover_treatment ? 1 : 0;
    }
  }
  if (with_ci > 0) {
    s.coverage_control = static_cast<double>(cover_c) / static_cast<double>(with_ci);
    s.coverage_treatment = static_cast<double>(cover_t) / static_cast<double>(with_ci);
  }
  if (s.failed * 10 > config.replicates)
    raise(errc::numeric, "run_comparison: more than 10% of replicates failed (" +
                             std::to_string(s.failed) + "/" + std::to_string(config.replicates) + ")");
  return report;
}

SweepResult sweep_outcome_threshold(const TrialDataset& data, std::span<const double> thresholds,
                                    const SegmentRule& rule, Grid grid) {
  if (!data.has_records())
    raise(errc::insufficient_data, "sweep_outcome_threshold: subject records required");
  for (const auto& r : data.records)
    if (!r.outcome_value)
      raise(errc::insufficient_data,
            "sweep_outcome_threshold: every record needs an outcome_value");

  SweepResult result;
  for (double t : thresholds) {
    TrialDataset relabeled = data;
    relabeled.outcome_threshold = t;
    std::int64_t n_out = 0;
    for (auto& r : relabeled.records) {
      r.outcome = *r.outcome_value > t;
      n_out += r.outcome ? 1 : 0;
    }
    const std::int64_t n_no = static_cast<std::int64_t>(relabeled.records.size()) - n_out;
    if (n_out < 2 || n_no < 2) {
      result.skipped.emplace_back(t, "outcome stratum below 2 subjects (" + std::to_string(n_out) +
                                         " with, " + std::to_string(n_no) + " without)");
      continue;
    }
    try {
      const OutcomeModel fitted = fit_model_from_records(relabeled);
      const Arm control = relabeled.control;
      const ArmSet treatments = relabeled.treatment_arms();
      const double split = segment_split(rule);
      const DichotomousLikelihoods lik_for_control =
          empirical_dichotomous(subset_arms(relabeled, treatments), split);
      const DichotomousLikelihoods lik_for_treatment =
          empirical_dichotomous(subset_arms(relabeled, {control}), split);

      const Grouping g_control{control.label, {control}};
      const Grouping g_treatment{"treatment", treatments};
      const PriorEstimate prior_c =
          estimate_all_priors(relabeled, rule, lik_for_control, prior_method::count_based,
                              std::vector<Grouping>{g_control})
              .front();
      const PriorEstimate prior_t =
          estimate_all_priors(relabeled, rule, lik_for_treatment, prior_method::count_based,
                              std::vector<Grouping>{g_treatment})
              .front();

      SweepEntry entry{t,      n_out,
                       n_no,   fitted,
                       posterior_curve(fitted, prior_c, grid),
                       posterior_curve(fitted, prior_t, grid)};
      result.entries.push_back(std::move(entry));
    } catch (const error& e) {
      result.skipped.emplace_back(t, e.what());
    }
  }
  return result;
}

}  // namespace segtrial
