#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"
#include "segtrial/errors.hpp"

namespace cli = segtrial::cli;

namespace {

void add_data_flags(CLI::App* cmd, cli::DataArgs& args) {
  cmd->add_option("--data", args.data_path, "CSV dataset (subject or bin format, by header)");
  cmd->add_option("--builtin", args.builtin, "builtin dataset (irma2)");
  cmd->add_option("--sidecar", args.sidecar_path, "JSON metadata sidecar");
  cmd->add_option("--eligibility", args.eligibility, "eligibility range lo,hi");
  cmd->add_option("--outcome-threshold", args.outcome_threshold, "outcome threshold");
  cmd->add_option("--control", args.control_label, "control arm label");
}

void add_format_flag(CLI::App* cmd, cli::output_format& format) {
  cmd->add_option_function<std::string>(
         "--format",
         [&format](const std::string& value) {
           if (value == "table")
             format = cli::output_format::table;
           else if (value == "json")
             format = cli::output_format::json;
           else if (value == "csv")
             format = cli::output_format::csv;
           else
             throw CLI::ValidationError("--format", "want table|json|csv");
         },
         "console output format (table|json|csv)")
      ->expected(1);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"segmental-trial analysis of treatment effects from threshold-allocated data"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("segtrial ") + cli::version);

  cli::FitArgs fit;
  auto* fit_cmd = app.add_subcommand("fit", "fit outcome-conditional ln-value distributions");
  add_data_flags(fit_cmd, fit.data);
  fit_cmd->add_option("--threshold", fit.threshold, "dichotomising threshold")->capture_default_str();
  fit_cmd->add_option("--reconstruct", fit.reconstruct,
                      "bin reconstruction strategy (midpoint|model-conditional)");
  fit_cmd->add_option("--model", fit.model_path, "reconstruction model JSON");
  fit_cmd->add_option("--builtin-model", fit.builtin_model, "builtin model (segmental|pooled)");
  fit_cmd->add_option("--seed", fit.seed, "reconstruction seed")->capture_default_str();
  fit_cmd->add_option("--out", fit.out_dir, "output directory")->capture_default_str();
  add_format_flag(fit_cmd, fit.format);

  cli::EstimateArgs estimate;
  auto* est_cmd = app.add_subcommand("estimate", "estimate arm priors by the Bayes rearrangement");
  add_data_flags(est_cmd, estimate.data);
  est_cmd->add_option("--threshold", estimate.threshold, "segment threshold")->capture_default_str();
  est_cmd->add_option("--method", estimate.method, "count|tail")->capture_default_str();
  est_cmd->add_option("--tail-areas", estimate.tail_areas, "below-threshold areas a,b (tail)");
  est_cmd->add_option("--likelihoods", estimate.likelihoods,
                      "count likelihood source (builtin|segment|full)");
  est_cmd->add_option("--model", estimate.model_path, "model JSON for tail ratios");
  est_cmd->add_option("--builtin-model", estimate.builtin_model, "builtin model (segmental|pooled)");
  est_cmd->add_option("--out", estimate.out_dir, "output directory")->capture_default_str();
  add_format_flag(est_cmd, estimate.format);

  cli::CurvesArgs curves;
  auto* curves_cmd = app.add_subcommand("curves", "write posterior and risk-reduction curves");
  curves_cmd->add_option("--model", curves.model_path, "model JSON");
  curves_cmd->add_option("--builtin-model", curves.builtin_model, "builtin model (segmental|pooled)")
      ->capture_default_str();
  curves_cmd->add_option("--priors", curves.priors_path, "priors JSON from 'estimate'");
  curves_cmd->add_option("--grid", curves.grid, "evaluation grid lo,hi,step")->capture_default_str();
  curves_cmd->add_option("--out", curves.out_dir, "output directory")->capture_default_str();
  add_format_flag(curves_cmd, curves.format);

  cli::SimulateArgs simulate;
  auto* sim_cmd = app.add_subcommand("simulate", "run the segmental-vs-full comparison");
  sim_cmd->add_option("--config", simulate.config_path, "SimConfig JSON");
  sim_cmd->add_option("--replicates", simulate.replicates, "override replicate count");
  sim_cmd->add_option("--seed", simulate.seed, "override seed");
  sim_cmd->add_option("--out", simulate.out_dir, "output directory")->capture_default_str();
  add_format_flag(sim_cmd, simulate.format);

  CLI11_PARSE(app, argc, argv);

  try {
    if (fit_cmd->parsed()) return cli::cmd_fit(fit);
    if (est_cmd->parsed()) return cli::cmd_estimate(estimate);
    if (curves_cmd->parsed()) return cli::cmd_curves(curves);
    if (sim_cmd->parsed()) return cli::cmd_simulate(simulate);
  } catch (const segtrial::error& e) {
    std::cerr << "segtrial: " << e.what() << '\n';
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "segtrial: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
