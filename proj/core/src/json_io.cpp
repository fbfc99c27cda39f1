#include "segtrial/json_io.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include <nlohmann/json.hpp>

#include "segtrial/errors.hpp"

namespace segtrial {

using nlohmann::json;

namespace {

double require_number(const json& j, const std::string& path) {
  if (!j.is_number()) raise(errc::config, path + ": expected a number");
  return j.get<double>();
}

std::int64_t require_int(const json& j, const std::string& path) {
  if (!j.is_number_integer()) raise(errc::config, path + ": expected an integer");
  return j.get<std::int64_t>();
}

const json& require_field(const json& j, const char* key, const std::string& path) {
  if (!j.is_object() || !j.contains(key)) raise(errc::config, path + "." + key + ": missing field");
  return j.at(key);
}

}  // namespace

std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json to_json(const GaussianParams& p) {
  return json{{"mu", p.mu}, {"sigma", p.sigma}, {"n", p.n}};
}

GaussianParams gaussian_from_json(const json& j, const std::string& where) {
  GaussianParams p;
  p.mu = require_number(require_field(j, "mu", where), where + ".mu");
  p.sigma = require_number(require_field(j, "sigma", where), where + ".sigma");
  if (!(p.sigma > 0.0)) raise(errc::config, where + ".sigma: must be > 0");
  p.n = j.contains("n") ? require_int(j.at("n"), where + ".n") : 0;
  return p;
}

json to_json(const OutcomeModel& m) {
  return json{{"with", to_json(m.with_outcome)}, {"without", to_json(m.without_outcome)}};
}

OutcomeModel model_from_json(const json& j) {
  OutcomeModel m;
  m.with_outcome = gaussian_from_json(require_field(j, "with", "model"), "model.with");
  m.without_outcome = gaussian_from_json(require_field(j, "without", "model"), "model.without");
  return m;
}

json to_json(const DichotomousLikelihoods& lik) {
  return json{
      {"threshold", lik.threshold},
      {"events_high", lik.events_high},
      {"events_total", lik.events_total},
      {"nonevents_high", lik.nonevents_high},
      {"nonevents_total", lik.nonevents_total},
      {"p_high_given_outcome", lik.p_high_given_outcome()},
      {"p_high_given_no_outcome", lik.p_high_given_no_outcome()},
  };
}

json to_json(const IndependenceReport& report) {
  json fits = json::array();
  for (const auto& f : report.fits) {
    json item{{"group", f.group}, {"outcome", f.outcome}, {"n", f.n},
              {"flagged_small", f.flagged_small}};
    if (f.params) item["params"] = to_json(*f.params);
    fits.push_back(std::move(item));
  }
  json dich = json::array();
  for (const auto& d : report.dichotomous) {
    json item{{"group", d.group}};
    if (d.likelihoods) item["likelihoods"] = to_json(*d.likelihoods);
    dich.push_back(std::move(item));
  }
  json out{{"threshold", report.threshold},
           {"fits", std::move(fits)},
           {"dichotomous", std::move(dich)},
           {"max_likelihood_gap", report.max_likelihood_gap}};
  if (report.max_mu_gap) out["max_mu_gap"] = *report.max_mu_gap;
  if (report.max_sigma_gap) out["max_sigma_gap"] = *report.max_sigma_gap;
  return out;
}

json to_json(const PriorEstimate& est) {
  json arms = json::array();
  for (const auto& a : est.arms) arms.push_back(a.label);
  json out{
      {"group", est.group},
      {"arms", std::move(arms)},
      {"segment", {{"lo", est.segment_range.lo},
                   {"hi", std::isinf(est.segment_range.hi) ? json() : json(est.segment_range.hi)}}},
      {"events", est.events},
      {"non_events", est.non_events},
      {"conditional_odds", est.conditional_odds},
      {"likelihood_ratio", est.likelihood_ratio_used},
      {"prior_odds", est.prior_odds},
      {"prior_probability", est.prior_probability},
      {"method", est.method == prior_method::count_based ? "count" : "tail"},
      {"degenerate", est.degenerate},
  };
  if (est.observed)
    out["observed"] = json{{"events", est.observed->events},
                           {"total", est.observed->total},
                           {"probability", est.observed->probability}};
  return out;
}

PriorEstimate prior_from_json(const json& j) {
  PriorEstimate est;
  est.group = require_field(j, "group", "prior").get<std::string>();
  if (j.contains("arms"))
    for (const auto& a : j.at("arms")) est.arms.push_back(Arm{a.get<std::string>()});
  est.events = require_int(require_field(j, "events", "prior"), "prior.events");
  est.non_events = require_int(require_field(j, "non_events", "prior"), "prior.non_events");
  est.conditional_odds = require_number(require_field(j, "conditional_odds", "prior"),
                                        "prior.conditional_odds");
  est.likelihood_ratio_used =
      require_number(require_field(j, "likelihood_ratio", "prior"), "prior.likelihood_ratio");
  est.prior_odds = require_number(require_field(j, "prior_odds", "prior"), "prior.prior_odds");
  est.prior_probability = require_number(require_field(j, "prior_probability", "prior"),
                                         "prior.prior_probability");
  const std::string method = require_field(j, "method", "prior").get<std::string>();
  est.method = method == "tail" ? prior_method::parametric_tail : prior_method::count_based;
  est.degenerate = j.value("degenerate", false);
  if (j.contains("segment")) {
    const json& seg = j.at("segment");
    est.segment_range.lo = seg.value("lo", 0.0);
    est.segment_range.hi = seg.contains("hi") && seg.at("hi").is_number()
                               ? seg.at("hi").get<double>()
                               : std::numeric_limits<double>::infinity();
  }
  if (j.contains("observed")) {
    const json& o = j.at("observed");
    est.observed = ObservedPrior{require_int(require_field(o, "events", "prior.observed"),
                                             "prior.observed.events"),
                                 require_int(require_field(o, "total", "prior.observed"),
                                             "prior.observed.total"),
                                 require_number(require_field(o, "probability", "prior.observed"),
                                                "prior.observed.probability")};
  }
  return est;
}

json to_json(const EffectSummary& s) {
  return json{{"relative_risk", s.relative_risk},
              {"odds_ratio", s.odds_ratio},
              {"control", to_json(s.prior_control)},
              {"treatment", to_json(s.prior_treatment)}};
}

json to_json(const CalibrationReport& r) {
  return json{{"n", r.n},
              {"mean_posterior", r.mean_posterior},
              {"target_prevalence", r.target_prevalence},
              {"delta", r.delta}};
}

json to_json(const IntervalEstimate& ci) {
  json out{{"point", ci.point},
           {"lo", ci.lo},
           {"hi", ci.hi},
           {"level", ci.level},
           {"method", ci.method == interval_method::exact_binomial ? "exact_binomial" : "bootstrap"}};
  if (ci.method == interval_method::bootstrap) {
    out["replicates"] = ci.replicates;
    out["skipped"] = ci.skipped;
  }
  return out;
}

json to_json(const SimConfig& config) {
  json out{
      {"n_control", config.n_control},
      {"n_treatment", config.n_treatment},
      {"true_prior_control", config.true_prior_control},
      {"true_prior_treatment", config.true_prior_treatment},
      {"model", to_json(config.model)},
      {"eligibility", {config.eligibility.lo, config.eligibility.hi}},
      {"threshold", config.threshold},
      {"replicates", config.replicates},
      {"seed", config.seed},
      {"bootstrap_replicates", config.bootstrap_replicates},
      {"bootstrap_level", config.bootstrap_level},
  };
  if (config.outcome_value) {
    json ov{{"threshold", config.outcome_value->threshold}};
    if (config.outcome_value->mu) ov["mu"] = *config.outcome_value->mu;
    if (config.outcome_value->sigma) ov["sigma"] = *config.outcome_value->sigma;
    out["outcome_value"] = std::move(ov);
  }
  return out;
}

SimConfig sim_config_from_json(const json& j) {
  SimConfig c;
  c.n_control = require_int(require_field(j, "n_control", "config"), "config.n_control");
  c.n_treatment = require_int(require_field(j, "n_treatment", "config"), "config.n_treatment");
  c.true_prior_control = require_number(require_field(j, "true_prior_control", "config"),
                                        "config.true_prior_control");
  c.true_prior_treatment = require_number(require_field(j, "true_prior_treatment", "config"),
                                          "config.true_prior_treatment");
  c.model = model_from_json(require_field(j, "model", "config"));
  const json& elig = require_field(j, "eligibility", "config");
  if (!elig.is_array() || elig.size() != 2)
    raise(errc::config, "config.eligibility: expected [lo, hi]");
  c.eligibility = Range{require_number(elig[0], "config.eligibility[0]"),
                        require_number(elig[1], "config.eligibility[1]")};
  c.threshold = require_number(require_field(j, "threshold", "config"), "config.threshold");
  if (j.contains("replicates"))
    c.replicates = require_int(j.at("replicates"), "config.replicates");
  if (j.contains("seed")) c.seed = static_cast<std::uint64_t>(require_int(j.at("seed"), "config.seed"));
  if (j.contains("bootstrap_replicates"))
    c.bootstrap_replicates = require_int(j.at("bootstrap_replicates"), "config.bootstrap_replicates");
  if (j.contains("bootstrap_level"))
    c.bootstrap_level = require_number(j.at("bootstrap_level"), "config.bootstrap_level");
  if (j.contains("outcome_value")) {
    const json& ov = j.at("outcome_value");
    OutcomeValueSpec spec;
    spec.threshold = require_number(require_field(ov, "threshold", "config.outcome_value"),
                                    "config.outcome_value.threshold");
    if (ov.contains("mu")) spec.mu = require_number(ov.at("mu"), "config.outcome_value.mu");
    if (ov.contains("sigma"))
      spec.sigma = require_number(ov.at("sigma"), "config.outcome_value.sigma");
    c.outcome_value = spec;
  }
  c.validate();
  return c;
}

json to_json(const ComparisonReport& report) {
  const auto& s = report.summary;
  auto estimator = [](const EstimatorSummary& e) {
    return json{{"mean_control", e.mean_control},
                {"mean_treatment", e.mean_treatment},
                {"bias_control", e.bias_control},
                {"bias_treatment", e.bias_treatment},
                {"rmse_control", e.rmse_control},
                {"rmse_treatment", e.rmse_treatment}};
  };
  json summary{{"replicates", s.replicates},
               {"failed", s.failed},
               {"rct", estimator(s.rct)},
               {"segmental_count", estimator(s.seg_count)},
               {"segmental_tail", estimator(s.seg_tail)}};
  if (report.config.bootstrap_replicates > 0) {
    summary["coverage_control"] = s.coverage_control;
    summary["coverage_treatment"] = s.coverage_treatment;
  }
  return json{{"config", to_json(report.config)}, {"summary", std::move(summary)}};
}

DatasetMeta meta_from_json(const json& j, DatasetMeta defaults) {
  DatasetMeta meta = std::move(defaults);
  if (j.contains("eligibility")) {
    const json& e = j.at("eligibility");
    if (!e.is_array() || e.size() != 2) raise(errc::config, "sidecar.eligibility: expected [lo, hi]");
    meta.eligibility = Range{require_number(e[0], "sidecar.eligibility[0]"),
                             require_number(e[1], "sidecar.eligibility[1]")};
  }
  if (j.contains("outcome_threshold"))
    meta.outcome_threshold = require_number(j.at("outcome_threshold"), "sidecar.outcome_threshold");
  if (j.contains("control")) meta.control = Arm{j.at("control").get<std::string>()};
  if (j.contains("name")) meta.name = j.at("name").get<std::string>();
  return meta;
}

json curve_to_json(const PosteriorCurve& curve) {
  json points = json::array();
  for (std::size_t i = 0; i < curve.probabilities.size(); ++i)
    points.push_back({{"aer", curve.grid.value(i)}, {"probability", curve.probabilities[i]}});
  return json{{"group", curve.group},
              {"prior", to_json(curve.prior)},
              {"grid", {{"lo", curve.grid.lo}, {"hi", curve.grid.hi}, {"step", curve.grid.step}}},
              {"points", std::move(points)}};
}

void write_curve_csv(const PosteriorCurve& curve, std::ostream& out) {
  out << "aer,probability\n";
  for (std::size_t i = 0; i < curve.probabilities.size(); ++i)
    out << format_double(curve.grid.value(i)) << ',' << format_double(curve.probabilities[i])
        << '\n';
}

void write_arr_csv(const std::vector<std::pair<double, double>>& arr, std::ostream& out) {
  out << "aer,arr\n";
  for (const auto& [value, delta] : arr)
    out << format_double(value) << ',' << format_double(delta) << '\n';
}

void write_replicates_csv(const ComparisonReport& report, std::ostream& out) {
  const bool ci = report.config.bootstrap_replicates > 0;
  out << "replicate,ok,rct_control,rct_treatment,seg_count_control,seg_count_treatment,"
         "seg_tail_control,seg_tail_treatment,or_rct,or_seg_count";
  if (ci) out << ",ci_control_lo,ci_control_hi,cover_control,ci_treatment_lo,ci_treatment_hi,cover_treatment";
  out << ",note\n";
  for (const auto& r : report.rows) {
    out << r.index << ',' << (r.ok ? 1 : 0);
    auto emit = [&out](double v) { out << ',' << format_double(v); };
    emit(r.rct_control);
    emit(r.rct_treatment);
    emit(r.seg_count_control);
    emit(r.seg_count_treatment);
    emit(r.seg_tail_control);
    emit(r.seg_tail_treatment);
    emit(r.or_rct);
    emit(r.or_seg_count);
    if (ci) {
      emit(r.ci_control ? r.ci_control->lo : 0.0);
      emit(r.ci_control ? r.ci_control->hi : 0.0);
      out << ',' << (r.cover_control ? 1 : 0);
      emit(r.ci_treatment ? r.ci_treatment->lo : 0.0);
      emit(r.ci_treatment ? r.ci_treatment->hi : 0.0);
      out << ',' << (r.cover_treatment ? 1 : 0);
    }
    out << ',' << r.note << '\n';
  }
}

}  // namespace segtrial
