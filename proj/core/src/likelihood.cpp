#include "segtrial/likelihood.hpp"

#include <algorithm>
#include <cmath>

#include "segtrial/errors.hpp"
#include "segtrial/stats.hpp"

namespace segtrial {

double DichotomousLikelihoods::p_high_given_outcome() const {
  return static_cast<double>(events_high) / static_cast<double>(events_total);
}

double DichotomousLikelihoods::p_high_given_no_outcome() const {
  return static_cast<double>(nonevents_high) / static_cast<double>(nonevents_total);
}

GaussianParams fit_log_gaussian(std::span<const double> values) {
  if (values.size() < 2)
    raise(errc::insufficient_data, "fit_log_gaussian: need at least 2 values, got " +
                                       std::to_string(values.size()));
  double sum = 0.0;
  for (double v : values) {
    if (!(v > 0.0)) raise(errc::domain, "fit_log_gaussian: values must be > 0");
    sum += std::log(v);
  }
  const double n = static_cast<double>(values.size());
  const double mu = sum / n;
  double ss = 0.0;
  for (double v : values) {
    const double d = std::log(v) - mu;
    ss += d * d;
  }
  const double sigma = std::sqrt(ss / (n - 1.0));
  if (!(sigma > 0.0))
    raise(errc::domain, "fit_log_gaussian: degenerate distribution (all values identical)");
  return GaussianParams{mu, sigma, static_cast<std::int64_t>(values.size())};
}

double point_likelihood_ratio(const OutcomeModel& model, double value) {
  if (!(value > 0.0)) raise(errc::domain, "point_likelihood_ratio: value must be > 0");
  const double x = std::log(value);
  const auto& w = model.with_outcome;
  const auto& wo = model.without_outcome;
  const double num = normal_pdf((x - w.mu) / w.sigma) / w.sigma;
  const double den = normal_pdf((x - wo.mu) / wo.sigma) / wo.sigma;
  return num / den;
}

double tail_likelihood_ratio(const OutcomeModel& model, double threshold, lr_side side) {
  if (!(threshold > 0.0)) raise(errc::domain, "tail_likelihood_ratio: threshold must be > 0");
  const double x = std::log(threshold);
  const double below_with = normal_cdf((x - model.with_outcome.mu) / model.with_outcome.sigma);
  const double below_without =
      normal_cdf((x - model.without_outcome.mu) / model.without_outcome.sigma);
  const double num = side == lr_side::below ? below_with : 1.0 - below_with;
  const double den = side == lr_side::below ? below_without : 1.0 - below_without;
  if (den < 1e-12)
    raise(errc::numeric, "tail_likelihood_ratio: no-outcome tail area underflows (< 1e-12)");
  return num / den;
}

DichotomousLikelihoods empirical_dichotomous(const TrialDataset& data, double threshold) {
  if (!(threshold > 0.0)) raise(errc::domain, "empirical_dichotomous: threshold must be > 0");
  DichotomousLikelihoods out;
  out.threshold = threshold;
  for (const auto& r : data.records) {
    const bool high = r.baseline_value > threshold;
    if (r.outcome) {
      out.events_total += 1;
      out.events_high += high ? 1 : 0;
    } else {
      out.nonevents_total += 1;
      out.nonevents_high += high ? 1 : 0;
    }
  }
  for (const auto& b : data.bins) {
    const bool low_side = b.range.hi <= threshold;
    const bool high_side = b.range.lo >= threshold;
    if (!low_side && !high_side)
      raise(errc::boundary, "bin (" + std::to_string(b.range.lo) + ", " +
                                std::to_string(b.range.hi) + "] straddles threshold " +
                                std::to_string(threshold));
    out.events_total += b.events;
    out.nonevents_total += b.total - b.events;
    if (high_side) {
      out.events_high += b.events;
      out.nonevents_high += b.total - b.events;
    }
  }
  if (out.events_total == 0)
    raise(errc::insufficient_data, "empirical_dichotomous: no subjects with the outcome");
  if (out.nonevents_total == 0)
    raise(errc::insufficient_data, "empirical_dichotomous: no subjects without the outcome");
  return out;
}

IndependenceReport check_intervention_independence(const TrialDataset& data, double threshold) {
  const ArmSet treatments = data.treatment_arms();
  if (treatments.empty())
    raise(errc::insufficient_data,
          "check_intervention_independence: both arms required (control and treatment)");
  bool control_present = false;
  for (const auto& r : data.records) control_present |= r.arm == data.control;
  for (const auto& b : data.bins) control_present |= b.arm == data.control;
  if (!control_present)
    raise(errc::insufficient_data,
          "check_intervention_independence: both arms required (control arm has no data)");

  IndependenceReport report;
  report.threshold = threshold;

  struct Group {
    std::string label;
    TrialDataset subset;
  };
  const std::vector<Group> groups{
      {data.control.label, subset_arms(data, {data.control})},
      {"treatment", subset_arms(data, treatments)},
  };

  for (const auto& g : groups) {
    for (bool outcome : {true, false}) {
      StratumFit fit;
      fit.group = g.label;
      fit.outcome = outcome;
      std::vector<double> values;
      for (const auto& r : g.subset.records)
        if (r.outcome == outcome) values.push_back(r.baseline_value);
      std::int64_t bin_n = 0;
      for (const auto& b : g.subset.bins) bin_n += outcome ? b.events : b.total - b.events;
      fit.n = static_cast<std::int64_t>(values.size()) + bin_n;
      fit.flagged_small = fit.n < 2;
      if (values.size() >= 2) {
        const bool identical =
            std::adjacent_find(values.begin(), values.end(), std::not_equal_to<double>()) ==
            values.end();
        if (!identical) fit.params = fit_log_gaussian(values);
      }
      report.fits.push_back(std::move(fit));
    }
    try {
      report.dichotomous.push_back({g.label, empirical_dichotomous(g.subset, threshold)});
    } catch (const error& e) {
      if (e.code() != errc::insufficient_data) throw;
      report.dichotomous.push_back({g.label, std::nullopt});
    }
  }

  // gaps are cross-group absolute differences within the same outcome stratum
  for (bool outcome : {true, false}) {
    const StratumFit* a = nullptr;
    const StratumFit* b = nullptr;
    for (const auto& f : report.fits) {
      if (f.outcome != outcome) continue;
      (f.group == data.control.label ? a : b) = &f;
    }
    if (a && b && a->params && b->params) {
      const double mu_gap = std::abs(a->params->mu - b->params->mu);
      const double sigma_gap = std::abs(a->params->sigma - b->params->sigma);
      report.max_mu_gap = std::max(report.max_mu_gap.value_or(0.0), mu_gap);
      report.max_sigma_gap = std::max(report.max_sigma_gap.value_or(0.0), sigma_gap);
    }
  }
  if (report.dichotomous[0].likelihoods && report.dichotomous[1].likelihoods) {
    const auto& d0 = *report.dichotomous[0].likelihoods;
    const auto& d1 = *report.dichotomous[1].likelihoods;
    report.max_likelihood_gap =
        std::max(std::abs(d0.p_high_given_outcome() - d1.p_high_given_outcome()),
                 std::abs(d0.p_high_given_no_outcome() - d1.p_high_given_no_outcome()));
  }
  return report;
}

}  // namespace segtrial
