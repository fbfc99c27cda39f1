#include "segtrial/validation.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "segtrial/errors.hpp"
#include "segtrial/rng.hpp"
#include "segtrial/stats.hpp"

namespace segtrial {

CalibrationReport calibration_check(const PosteriorCurve& curve,
                                    std::span<const SubjectRecord> records) {
  if (records.empty()) raise(errc::insufficient_data, "calibration_check: no records");
  double sum = 0.0;
  for (const auto& r : records) sum += curve.probability_at(r.baseline_value);
  const double mean = sum / static_cast<double>(records.size());
  const double target = curve.prior.prior_probability;
  return CalibrationReport{static_cast<std::int64_t>(records.size()), mean, target, mean - target};
}

IntervalEstimate exact_binomial_ci(std::int64_t events, std::int64_t total, double level) {
  if (total < 1) raise(errc::domain, "exact_binomial_ci: total must be >= 1");
  if (events < 0 || events > total)
    raise(errc::domain, "exact_binomial_ci: need 0 <= events <= total");
  if (!(level > 0.0 && level < 1.0)) raise(errc::domain, "exact_binomial_ci: level in (0,1)");

  const double alpha = (1.0 - level) / 2.0;
  const double e = static_cast<double>(events);
  const double n = static_cast<double>(total);
  const double lo = events == 0 ? 0.0 : beta_quantile(alpha, e, n - e + 1.0);
  const double hi = events == total ? 1.0 : beta_quantile(1.0 - alpha, e + 1.0, n - e);
  return IntervalEstimate{e / n, lo, hi, level, interval_method::exact_binomial};
}

namespace {

double percentile(std::vector<double>& sorted_values, double q) {
  // linear interpolation between order statistics
  const std::size_t n = sorted_values.size();
  const double pos = q * static_cast<double>(n - 1);
  const std::size_t i = std::min(static_cast<std::size_t>(pos), n - 2);
  const double frac = pos - static_cast<double>(i);
  return sorted_values[i] * (1.0 - frac) + sorted_values[i + 1] * frac;
}

}  // namespace

IntervalEstimate bootstrap_prior_ci(const TrialDataset& data, const SegmentRule& rule,
                                    const LikelihoodSource& likelihoods, prior_method method,
                                    const Grouping& grouping, const BootstrapSpec& spec) {
  if (spec.replicates < 1000)
    raise(errc::config, "bootstrap_prior_ci: need at least 1000 replicates");
  if (!(spec.level > 0.0 && spec.level < 1.0))
    raise(errc::config, "bootstrap_prior_ci: level in (0,1)");

  const std::vector<Grouping> one{grouping};
  const PriorEstimate point = estimate_all_priors(data, rule, likelihoods, method, one).front();

  const std::int64_t seg_total = point.events + point.non_events;
  const double seg_p = static_cast<double>(point.events) / static_cast<double>(seg_total);
  const DichotomousLikelihoods* lik = std::get_if<DichotomousLikelihoods>(&likelihoods);
  const lr_side side = lik && point.segment_range.hi <= lik->threshold ? lr_side::below
                                                                       : lr_side::above;

  std::vector<double> draws;
  draws.reserve(static_cast<std::size_t>(spec.replicates));
  std::int64_t skipped = 0;
  for (std::int64_t rep = 0; rep < spec.replicates; ++rep) {
    RngStream rng(spec.seed, static_cast<std::uint64_t>(rep));
    const std::int64_t e_star = rng.binomial(seg_total, seg_p);
    const std::int64_t ne_star = seg_total - e_star;
    if (ne_star == 0) {
      ++skipped;
      continue;
    }
    double lr_star = point.likelihood_ratio_used;
    if (method == prior_method::count_based && lik) {
      const std::int64_t eh = rng.binomial(lik->events_total, lik->p_high_given_outcome());
      const std::int64_t nh = rng.binomial(lik->nonevents_total, lik->p_high_given_no_outcome());
      const double p_o = static_cast<double>(eh) / static_cast<double>(lik->events_total);
      const double p_n = static_cast<double>(nh) / static_cast<double>(lik->nonevents_total);
      lr_star = side == lr_side::below ? (1.0 - p_o) / (1.0 - p_n) : p_o / p_n;
      if (!(lr_star > 0.0) || !std::isfinite(lr_star)) {
        ++skipped;
        continue;
      }
    }
    const double odds_star = (static_cast<double>(e_star) / static_cast<double>(ne_star)) / lr_star;
    draws.push_back(prob_from_odds(odds_star));
  }

  if (skipped * 10 > spec.replicates)
    raise(errc::numeric, "bootstrap_prior_ci: more than 10% of replicates degenerate (" +
                             std::to_string(skipped) + "/" + std::to_string(spec.replicates) + ")");
  if (draws.size() < 2) raise(errc::numeric, "bootstrap_prior_ci: too few usable replicates");

  std::sort(draws.begin(), draws.end());
  const double alpha = (1.0 - spec.level) / 2.0;
  IntervalEstimate out{point.prior_probability,
                       percentile(draws, alpha),
                       percentile(draws, 1.0 - alpha),
                       spec.level,
                       interval_method::bootstrap,
                       spec.replicates,
                       skipped};
  return out;
}

}  // namespace segtrial
