#include "commands.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

#include "segtrial/builtin.hpp"
#include "segtrial/errors.hpp"
#include "segtrial/json_io.hpp"
#include "segtrial/likelihood.hpp"
#include "segtrial/reconstruct.hpp"
#include "segtrial/simulator.hpp"
#include "segtrial/stats.hpp"
#include "segtrial/svg.hpp"
#include "segtrial/validation.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace segtrial::cli {

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(errc::io, "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

json read_json_file(const std::string& path) {
  const std::string text = read_file(path);
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) raise(errc::parse, path + ": invalid JSON");
  return j;
}

std::string fmt3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

struct Outputs {
  std::string command;
  std::vector<std::string> inputs;
  json parameters = json::object();
  std::optional<std::uint64_t> seed;
  fs::path dir;
  std::vector<std::string> written;

  explicit Outputs(std::string cmd, const std::string& out_dir) : command(std::move(cmd)), dir(out_dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) raise(errc::io, "cannot create output directory " + out_dir);
  }

  void write(const std::string& name, const std::string& content) {
    const fs::path p = dir / name;
    std::ofstream out(p, std::ios::binary);
    if (!out) raise(errc::io, "cannot write " + p.string());
    out << content;
    out.close();
    written.push_back(name);
  }

  // the manifest goes last so it only ever lists files that exist
  void finish() {
    json m{{"command", command},
           {"inputs", inputs},
           {"parameters", parameters},
           {"version", version},
           {"outputs", written}};
    m["seed"] = seed ? json(*seed) : json();
    json listed = m["outputs"];
    listed.push_back("manifest.json");
    m["outputs"] = listed;
    const fs::path p = dir / "manifest.json";
    std::ofstream out(p, std::ios::binary);
    if (!out) raise(errc::io, "cannot write " + p.string());
    out << m.dump(2) << '\n';
  }
};

std::vector<double> parse_number_list(const std::string& text, std::size_t want,
                                      const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      raise(errc::config, what + ": expected numbers, got '" + text + "'");
    }
  }
  if (out.size() != want)
    raise(errc::config, what + ": expected " + std::to_string(want) + " comma-separated numbers");
  return out;
}

struct LoadedData {
  TrialDataset dataset;
  bool is_builtin = false;
};

LoadedData load_dataset(const DataArgs& args, Outputs& outputs) {
  if (!args.builtin.empty()) {
    if (args.builtin != "irma2") raise(errc::config, "unknown builtin dataset '" + args.builtin + "'");
    if (!args.data_path.empty()) raise(errc::config, "--data and --builtin are mutually exclusive");
    outputs.inputs.push_back("builtin:irma2");
    return {builtin_irma2(), true};
  }
  if (args.data_path.empty()) raise(errc::config, "one of --data or --builtin is required");

  DatasetMeta meta;
  meta.name = fs::path(args.data_path).stem().string();
  if (!args.sidecar_path.empty()) {
    meta = meta_from_json(read_json_file(args.sidecar_path), meta);
    outputs.inputs.push_back(args.sidecar_path);
  }
  if (!args.eligibility.empty()) {
    const auto lh = parse_number_list(args.eligibility, 2, "--eligibility");
    meta.eligibility = Range{lh[0], lh[1]};
  }
  if (args.outcome_threshold) meta.outcome_threshold = *args.outcome_threshold;
  if (!args.control_label.empty()) meta.control = Arm{args.control_label};

  const std::string text = read_file(args.data_path);
  outputs.inputs.push_back(args.data_path);
  const bool bin_format = text.rfind("lo,", 0) == 0;
  std::istringstream in(text);
  return {parse_dataset(in, bin_format ? csv_format::bin_csv : csv_format::subject_csv, meta),
          false};
}

OutcomeModel builtin_model_by_name(const std::string& name) {
  if (name == "segmental") return irma2::segmental_model();
  if (name == "pooled") return irma2::pooled_model();
  raise(errc::config, "unknown builtin model '" + name + "' (want segmental|pooled)");
}

/// Pooled label for the treatment arms: common dash-prefix when one exists.
std::string pooled_label(const ArmSet& treatments) {
  if (treatments.empty()) return "treatment";
  const std::string& first = treatments.front().label;
  const auto dash = first.find('-');
  if (dash == std::string::npos) return treatments.size() == 1 ? first : "treatment";
  const std::string prefix = first.substr(0, dash);
  for (const auto& arm : treatments)
    if (arm.label.rfind(prefix + "-", 0) != 0) return "treatment";
  return prefix;
}

SegmentRule threshold_rule(const TrialDataset& data, double threshold) {
  SegmentRule rule;
  rule.segments.push_back(Segment{Range{0.0, threshold}, {data.control}});
  rule.segments.push_back(Segment{Range{threshold, std::numeric_limits<double>::infinity()},
                                  data.treatment_arms()});
  return rule;
}

std::vector<Grouping> default_groupings(const TrialDataset& data) {
  const ArmSet treatments = data.treatment_arms();
  std::vector<Grouping> out;
  out.push_back({data.control.label, {data.control}});
  out.push_back({pooled_label(treatments), treatments});
  if (treatments.size() > 1)
    for (const auto& arm : treatments) out.push_back({arm.label, {arm}});
  return out;
}

}  // namespace

int cmd_fit(const FitArgs& args) {
  Outputs outputs("fit", args.out_dir);
  auto loaded = load_dataset(args.data, outputs);
  TrialDataset data = std::move(loaded.dataset);

  outputs.parameters = json{{"threshold", args.threshold},
                            {"reconstruct", args.reconstruct},
                            {"format", args.format == output_format::json ? "json" : "table"}};
  outputs.seed = args.seed;

  if (!data.has_records()) {
    if (args.reconstruct.empty())
      raise(errc::insufficient_data,
            "dataset has only aggregate bins; pass --reconstruct midpoint|model-conditional");
    if (args.reconstruct == "midpoint") {
      data = reconstruct_dataset(data, reconstruct_strategy::midpoint);
    } else if (args.reconstruct == "model-conditional") {
      OutcomeModel model;
      if (!args.model_path.empty())
        model = model_from_json(read_json_file(args.model_path));
      else if (!args.builtin_model.empty())
        model = builtin_model_by_name(args.builtin_model);
      else if (loaded.is_builtin)
        model = irma2::segmental_model();
      else
        raise(errc::config, "model-conditional reconstruction needs --model or --builtin-model");
      data = reconstruct_dataset(data, reconstruct_strategy::model_conditional, &model, args.seed);
    } else {
      raise(errc::config, "unknown --reconstruct strategy '" + args.reconstruct + "'");
    }
  }

  std::vector<double> with_values, without_values;
  for (const auto& r : data.records)
    (r.outcome ? with_values : without_values).push_back(r.baseline_value);
  if (with_values.size() < 2)
    raise(errc::insufficient_data, "outcome stratum has " + std::to_string(with_values.size()) +
                                       " subjects; need at least 2");
  if (without_values.size() < 2)
    raise(errc::insufficient_data, "no-outcome stratum has " +
                                       std::to_string(without_values.size()) +
                                       " subjects; need at least 2");
  const OutcomeModel model{fit_log_gaussian(with_values), fit_log_gaussian(without_values)};

  const IndependenceReport independence = check_intervention_independence(data, args.threshold);

  outputs.write("model.json", to_json(model).dump(2) + "\n");
  outputs.write("independence.json", to_json(independence).dump(2) + "\n");
  outputs.finish();

  if (args.format == output_format::json) {
    std::cout << json{{"model", to_json(model)}, {"independence", to_json(independence)}}.dump(2)
              << '\n';
  } else {
    std::cout << "ln-value model (" << data.name << ")\n";
    std::cout << "  stratum      mu     sigma      n\n";
    std::cout << "  outcome    " << fmt3(model.with_outcome.mu) << "   " << fmt3(model.with_outcome.sigma)
              << "  " << model.with_outcome.n << '\n';
    std::cout << "  no outcome " << fmt3(model.without_outcome.mu) << "   "
              << fmt3(model.without_outcome.sigma) << "  " << model.without_outcome.n << '\n';
    std::cout << "independence at threshold " << fmt3(args.threshold) << '\n';
    for (const auto& f : independence.fits) {
      std::cout << "  " << f.group << (f.outcome ? " / outcome" : " / no outcome") << ": n=" << f.n;
      if (f.params)
        std::cout << " mu=" << fmt3(f.params->mu) << " sigma=" << fmt3(f.params->sigma);
      if (f.flagged_small) std::cout << " (small stratum)";
      std::cout << '\n';
    }
    if (independence.max_mu_gap)
      std::cout << "  max mu gap " << fmt3(*independence.max_mu_gap) << ", max sigma gap "
                << fmt3(independence.max_sigma_gap.value_or(0.0)) << '\n';
    std::cout << "  max dichotomous likelihood gap " << fmt3(independence.max_likelihood_gap)
              << '\n';
  }
  return 0;
}

int cmd_estimate(const EstimateArgs& args) {
  Outputs outputs("estimate", args.out_dir);
  auto loaded = load_dataset(args.data, outputs);
  const TrialDataset& data = loaded.dataset;

  const SegmentRule rule =
      loaded.is_builtin && args.threshold == irma2::segment_threshold
          ? irma2::segment_rule()
          : threshold_rule(data, args.threshold);
  const std::vector<Grouping> groupings = default_groupings(data);

  LikelihoodSource source = DichotomousLikelihoods{};
  prior_method method = prior_method::count_based;
  std::vector<std::string> notes;

  if (args.method == "count") {
    std::string mode = args.likelihoods;
    if (mode.empty()) mode = loaded.is_builtin ? "builtin" : "segment";
    if (mode == "builtin") {
      if (!loaded.is_builtin) raise(errc::config, "--likelihoods builtin needs --builtin irma2");
      source = irma2::segmental_likelihoods();
      notes.push_back("likelihood table: published segmental counts (19/29, 47/171)");
    } else if (mode == "segment") {
      source = empirical_dichotomous(apply_segment_filter(data, rule), args.threshold);
      notes.push_back("likelihood table: counted from the segment-filtered data");
    } else if (mode == "full") {
      source = empirical_dichotomous(data, args.threshold);
      notes.push_back("likelihood table: counted from the full dataset");
    } else {
      raise(errc::config, "unknown --likelihoods mode '" + mode + "'");
    }
  } else if (args.method == "tail") {
    method = prior_method::parametric_tail;
    if (!args.tail_areas.empty()) {
      const auto ab = parse_number_list(args.tail_areas, 2, "--tail-areas");
      if (!(ab[0] > 0.0 && ab[0] < 1.0 && ab[1] > 0.0 && ab[1] < 1.0))
        raise(errc::config, "--tail-areas: areas must be in (0,1)");
      source = TailAreas{ab[0], ab[1], args.threshold};
      notes.push_back("tail areas taken as given: " + fmt3(ab[0]) + " / " + fmt3(ab[1]));
    } else {
      OutcomeModel model;
      if (!args.model_path.empty())
        model = model_from_json(read_json_file(args.model_path));
      else if (!args.builtin_model.empty())
        model = builtin_model_by_name(args.builtin_model);
      else if (loaded.is_builtin)
        model = irma2::segmental_model();
      else
        raise(errc::config, "--method tail needs --tail-areas, --model, or --builtin-model");
      source = model;
      const double below_with =
          normal_cdf((std::log(args.threshold) - model.with_outcome.mu) / model.with_outcome.sigma);
      const double below_without = normal_cdf((std::log(args.threshold) - model.without_outcome.mu) /
                                              model.without_outcome.sigma);
      notes.push_back("tail areas from fitted parameters: " + fmt3(below_with) + " / " +
                      fmt3(below_without) + " at threshold " + fmt3(args.threshold));
      if (loaded.is_builtin) {
        const double quoted_area = normal_cdf((std::log(80.0) - 4.45) / 0.450);
        notes.push_back(
            "source discrepancy: the quoted with-outcome area 0.360 is attributed to mean 4.45, "
            "sd 0.450 (which gives " + fmt3(quoted_area) +
            "), while the fitted summary has mean 4.54, sd 0.42 (area " + fmt3(below_with) +
            "); estimates here use the fitted parameters");
      }
    }
  } else {
    raise(errc::config, "unknown --method '" + args.method + "' (want count|tail)");
  }

  const std::vector<PriorEstimate> priors =
      estimate_all_priors(data, rule, source, method, groupings);

  const EffectSummary effect = effect_summary(priors[0], priors[1]);

  json priors_json{{"control", to_json(priors[0])},
                   {"treatment", to_json(priors[1])},
                   {"notes", notes}};
  json subgroups = json::array();
  for (std::size_t i = 2; i < priors.size(); ++i) subgroups.push_back(to_json(priors[i]));
  priors_json["subgroups"] = std::move(subgroups);

  outputs.parameters = json{{"threshold", args.threshold},
                            {"method", args.method},
                            {"likelihoods", args.likelihoods},
                            {"tail_areas", args.tail_areas}};
  outputs.write("priors.json", priors_json.dump(2) + "\n");
  outputs.write("effect.json", to_json(effect).dump(2) + "\n");
  outputs.finish();

  if (args.format == output_format::json) {
    std::cout << json{{"priors", priors_json}, {"effect", to_json(effect)}}.dump(2) << '\n';
  } else {
    std::cout << "group            events/non-events  cond.odds  LR      est.odds  est.prob";
    std::cout << "  obs.prob\n";
    for (const auto& p : priors) {
      char line[160];
      std::snprintf(line, sizeof line, "%-16s %6lld/%-10lld %8.3f %7.3f %9.3f %9.3f",
                    p.group.c_str(), static_cast<long long>(p.events),
                    static_cast<long long>(p.non_events), p.conditional_odds,
                    p.likelihood_ratio_used, p.prior_odds, p.prior_probability);
      std::cout << line;
      if (p.observed) std::cout << "  " << fmt3(p.observed->probability);
      std::cout << '\n';
    }
    std::cout << "relative risk " << fmt3(effect.relative_risk) << ", odds ratio "
              << fmt3(effect.odds_ratio) << '\n';
    for (const auto& n : notes) std::cout << "note: " << n << '\n';
  }
  return 0;
}

int cmd_curves(const CurvesArgs& args) {
  Outputs outputs("curves", args.out_dir);

  OutcomeModel model;
  if (!args.model_path.empty()) {
    model = model_from_json(read_json_file(args.model_path));
    outputs.inputs.push_back(args.model_path);
  } else {
    model = builtin_model_by_name(args.builtin_model);
    outputs.inputs.push_back("builtin-model:" + args.builtin_model);
  }

  if (args.priors_path.empty()) raise(errc::grid, "--priors is required");
  const json priors_json = read_json_file(args.priors_path);
  outputs.inputs.push_back(args.priors_path);
  if (!priors_json.contains("control") || !priors_json.contains("treatment"))
    raise(errc::grid, args.priors_path + ": need 'control' and 'treatment' prior estimates");
  const PriorEstimate control = prior_from_json(priors_json.at("control"));
  const PriorEstimate treatment = prior_from_json(priors_json.at("treatment"));

  const auto g = parse_number_list(args.grid, 3, "--grid");
  if (!(g[2] > 0.0) || !(g[1] > g[0])) raise(errc::grid, "--grid: need lo < hi and step > 0");
  const Grid grid{g[0], g[1], g[2]};

  const PosteriorCurve curve_c = posterior_curve(model, control, grid);
  const PosteriorCurve curve_t = posterior_curve(model, treatment, grid);
  const auto arr = arr_curve(curve_c, curve_t);

  std::vector<SvgSeries> series;
  auto to_points = [&](const PosteriorCurve& c) {
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < c.probabilities.size(); ++i)
      pts.emplace_back(c.grid.value(i), c.probabilities[i]);
    return pts;
  };
  series.push_back({control.group + " (segment estimate)", to_points(curve_c), "#1f4e9c", false});
  series.push_back({treatment.group + " (segment estimate)", to_points(curve_t), "#b03030", false});

  std::ostringstream text;
  write_curve_csv(curve_c, text);
  outputs.write("posterior_" + control.group + ".csv", text.str());
  text.str("");
  write_curve_csv(curve_t, text);
  outputs.write("posterior_" + treatment.group + ".csv", text.str());

  auto observed_curve = [&](const PriorEstimate& base) {
    PriorEstimate obs = estimate_prior(base.observed->events,
                                       base.observed->total - base.observed->events, 1.0,
                                       base.group, base.method);
    obs.segment_range = base.segment_range;
    return posterior_curve(model, obs, grid);
  };
  if (control.observed) {
    const auto full_c = observed_curve(control);
    series.push_back({control.group + " (full data)", to_points(full_c), "#1f4e9c", true});
    text.str("");
    write_curve_csv(full_c, text);
    outputs.write("posterior_" + control.group + "_full.csv", text.str());
  }
  if (treatment.observed) {
    const auto full_t = observed_curve(treatment);
    series.push_back({treatment.group + " (full data)", to_points(full_t), "#b03030", true});
    text.str("");
    write_curve_csv(full_t, text);
    outputs.write("posterior_" + treatment.group + "_full.csv", text.str());
  }

  text.str("");
  write_arr_csv(arr, text);
  outputs.write("arr.csv", text.str());

  std::ostringstream svg;
  SvgPlotOptions posterior_options;
  posterior_options.title = "outcome probability by baseline value";
  write_svg_plot(svg, series, posterior_options);
  outputs.write("posterior.svg", svg.str());

  double max_arr = 0.0, argmax = grid.lo;
  for (const auto& [v, a] : arr)
    if (a > max_arr) {
      max_arr = a;
      argmax = v;
    }
  std::vector<SvgSeries> arr_series{{"absolute risk reduction", arr, "#1f7a33", false}};
  std::ostringstream arr_svg;
  SvgPlotOptions arr_options;
  arr_options.title = "absolute risk reduction by baseline value";
  arr_options.y_label = "risk reduction";
  write_svg_plot(arr_svg, arr_series, arr_options,
                 SvgAnnotation{argmax, max_arr, "max " + fmt3(max_arr) + " at " + fmt3(argmax)});
  outputs.write("arr.svg", arr_svg.str());

  outputs.parameters = json{{"grid", args.grid},
                            {"model", args.model_path.empty() ? "builtin:" + args.builtin_model
                                                              : args.model_path}};
  outputs.finish();

  if (args.format == output_format::json) {
    std::cout << json{{"max_arr", max_arr},
                      {"max_arr_at", argmax},
                      {"files", outputs.written}}.dump(2)
              << '\n';
  } else if (args.format == output_format::csv) {
    write_arr_csv(arr, std::cout);
  } else {
    std::cout << "curves written to " << args.out_dir << "; max ARR " << fmt3(max_arr) << " at "
              << fmt3(argmax) << '\n';
  }
  return 0;
}

int cmd_simulate(const SimulateArgs& args) {
  Outputs outputs("simulate", args.out_dir);
  if (args.config_path.empty()) raise(errc::config, "--config is required");
  SimConfig config = sim_config_from_json(read_json_file(args.config_path));
  outputs.inputs.push_back(args.config_path);
  if (args.replicates) config.replicates = *args.replicates;
  if (args.seed) config.seed = *args.seed;
  config.validate();
  outputs.seed = config.seed;
  outputs.parameters = json{{"replicates", config.replicates}};

  const ComparisonReport report = run_comparison(config);

  outputs.write("report.json", to_json(report).dump(2) + "\n");
  std::ostringstream csv;
  write_replicates_csv(report, csv);
  outputs.write("replicates.csv", csv.str());
  outputs.finish();

  if (args.format == output_format::json) {
    std::cout << to_json(report).dump(2) << '\n';
  } else {
    const auto& s = report.summary;
    std::cout << "replicates " << s.replicates << " (failed " << s.failed << ")\n";
    auto line = [](const char* name, const EstimatorSummary& e) {
      std::printf("%-18s control %.3f (bias %+.4f, rmse %.4f)  treatment %.3f (bias %+.4f, rmse %.4f)\n",
                  name, e.mean_control, e.bias_control, e.rmse_control, e.mean_treatment,
                  e.bias_treatment, e.rmse_treatment);
    };
    line("full-data", s.rct);
    line("segmental count", s.seg_count);
    line("segmental tail", s.seg_tail);
    if (report.config.bootstrap_replicates > 0)
      std::cout << "bootstrap coverage: control " << fmt3(s.coverage_control) << ", treatment "
                << fmt3(s.coverage_treatment) << '\n';
  }
  return 0;
}

}  // namespace segtrial::cli
