#pragma once

#include <optional>
#include <string>
#include <vector>

namespace segtrial::cli {

inline const char* version = "0.1.0";

enum class output_format { table, json, csv };

/// Dataset selection and metadata shared by fit/estimate.
struct DataArgs {
  std::string data_path;     // CSV file; empty when builtin is used
  std::string builtin;       // "irma2"
  std::string sidecar_path;  // JSON metadata sidecar
  std::string eligibility;   // "lo,hi" override
  std::optional<double> outcome_threshold;
  std::string control_label;  // override; default from sidecar or "placebo"
};

struct FitArgs {
  DataArgs data;
  double threshold = 80.0;
  std::string reconstruct;     // "", "midpoint", "model-conditional"
  std::string model_path;      // reconstruction model for external bins
  std::string builtin_model;   // "segmental" | "pooled"
  std::uint64_t seed = 0;
  output_format format = output_format::table;
  std::string out_dir = ".";
};

struct EstimateArgs {
  DataArgs data;
  double threshold = 80.0;
  std::string method = "count";  // "count" | "tail"
  std::string tail_areas;        // "a,b" below-areas (tail only)
  std::string likelihoods;       // "builtin" | "segment" | "full" (count only)
  std::string model_path;
  std::string builtin_model;  // "segmental" | "pooled"
  output_format format = output_format::table;
  std::string out_dir = ".";
};

struct CurvesArgs {
  std::string model_path;
  std::string builtin_model = "pooled";
  std::string priors_path;
  std::string grid = "20,200,1";
  output_format format = output_format::table;
  std::string out_dir = ".";
};

struct SimulateArgs {
  std::string config_path;
  std::optional<std::int64_t> replicates;
  std::optional<std::uint64_t> seed;
  output_format format = output_format::table;
  std::string out_dir = ".";
};

int cmd_fit(const FitArgs& args);
int cmd_estimate(const EstimateArgs& args);
int cmd_curves(const CurvesArgs& args);
int cmd_simulate(const SimulateArgs& args);

}  // namespace segtrial::cli
