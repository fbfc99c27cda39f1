#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace segtrial {

/// One polyline on a probability-vs-test-value plot.
struct SvgSeries {
  std::string label;
  std::vector<std::pair<double, double>> points;  // (value, probability)
  std::string color = "#000000";
  bool dashed = false;
};

struct SvgAnnotation {
  double x;
  double y;
  std::string text;
};

struct SvgPlotOptions {
  std::string title;
  std::string x_label = "AER (ug/min)";
  std::string y_label = "probability";
  std::optional<double> y_max;  // default: padded data maximum
};

/// Static SVG line plot: axes with ticks, legend, optional annotation.
/// Output is deterministic for identical inputs.
void write_svg_plot(std::ostream& out, const std::vector<SvgSeries>& series,
                    const SvgPlotOptions& options,
                    const std::optional<SvgAnnotation>& annotation = std::nullopt);

}  // namespace segtrial
