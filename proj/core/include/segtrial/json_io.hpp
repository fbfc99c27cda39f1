#pragma once

#include <iosfwd>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "segtrial/bayes.hpp"
#include "segtrial/likelihood.hpp"
#include "segtrial/simulator.hpp"
#include "segtrial/trial_data.hpp"
#include "segtrial/validation.hpp"

namespace segtrial {

// Documented JSON schemas are in the README. Keys are emitted in
// lexicographic order, so serialisation is byte-stable.

nlohmann::json to_json(const GaussianParams& p);
GaussianParams gaussian_from_json(const nlohmann::json& j, const std::string& where);

/// {"with": {"mu":..,"sigma":..,"n":..}, "without": {...}}
nlohmann::json to_json(const OutcomeModel& m);
OutcomeModel model_from_json(const nlohmann::json& j);

nlohmann::json to_json(const DichotomousLikelihoods& lik);
nlohmann::json to_json(const IndependenceReport& report);
nlohmann::json to_json(const PriorEstimate& est);
PriorEstimate prior_from_json(const nlohmann::json& j);
nlohmann::json to_json(const EffectSummary& s);
nlohmann::json to_json(const CalibrationReport& r);
nlohmann::json to_json(const IntervalEstimate& ci);
nlohmann::json to_json(const SimConfig& config);
SimConfig sim_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ComparisonReport& report);

/// Sidecar metadata: {"eligibility":[lo,hi],"outcome_threshold":t,"control":"placebo"}.
/// All fields optional; missing ones keep the defaults passed in.
DatasetMeta meta_from_json(const nlohmann::json& j, DatasetMeta defaults);

nlohmann::json curve_to_json(const PosteriorCurve& curve);

/// `aer,probability` rows at full precision.
void write_curve_csv(const PosteriorCurve& curve, std::ostream& out);

/// `aer,arr` rows at full precision.
void write_arr_csv(const std::vector<std::pair<double, double>>& arr, std::ostream& out);

/// `replicate,...` per-replicate rows of a comparison report.
void write_replicates_csv(const ComparisonReport& report, std::ostream& out);

/// Stable shortest-roundtrip-ish rendering used by all CSV writers.
std::string format_double(double v);

}  // namespace segtrial
