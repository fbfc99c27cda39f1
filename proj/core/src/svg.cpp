#include "segtrial/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "segtrial/errors.hpp"

namespace segtrial {

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 480.0;
constexpr double kMarginLeft = 64.0;
constexpr double kMarginRight = 24.0;
constexpr double kMarginTop = 40.0;
constexpr double kMarginBottom = 56.0;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

// data-space coordinates kept on the annotation node so files stay greppable
std::string data_coord(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

void write_svg_plot(std::ostream& out, const std::vector<SvgSeries>& series,
                    const SvgPlotOptions& options, const std::optional<SvgAnnotation>& annotation) {
  double x_min = 0.0, x_max = 1.0, y_max_data = 0.0;
  bool first = true;
  for (const auto& s : series)
    for (const auto& [x, y] : s.points) {
      if (first) {
        x_min = x_max = x;
        first = false;
      }
      x_min = std::min(x_min, x);
      x_max = std::max(x_max, x);
      y_max_data = std::max(y_max_data, y);
    }
  if (first) raise(errc::grid, "svg plot: no points");
  if (!(x_max > x_min)) x_max = x_min + 1.0;
  const double y_top = options.y_max ? *options.y_max : std::max(1e-6, y_max_data * 1.15);

  const double plot_w = kWidth - kMarginLeft - kMarginRight;
  const double plot_h = kHeight - kMarginTop - kMarginBottom;
  auto sx = [&](double x) { return kMarginLeft + (x - x_min) / (x_max - x_min) * plot_w; };
  auto sy = [&](double y) { return kMarginTop + plot_h - std::max(0.0, std::min(y, y_top)) / y_top * plot_h; };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n";
  out << "<rect width=\"" << kWidth << "\" height=\"" << kHeight << "\" fill=\"white\"/>\n";
  if (!options.title.empty())
    out << "<text x=\"" << num(kWidth / 2) << "\" y=\"22\" text-anchor=\"middle\" "
           "font-family=\"sans-serif\" font-size=\"15\">" << options.title << "</text>\n";

  // frame
  out << "<rect x=\"" << num(kMarginLeft) << "\" y=\"" << num(kMarginTop) << "\" width=\""
      << num(plot_w) << "\" height=\"" << num(plot_h)
      << "\" fill=\"none\" stroke=\"#444444\" stroke-width=\"1\"/>\n";

  // x ticks: 5 evenly spaced
  for (int i = 0; i <= 5; ++i) {
    const double xv = x_min + (x_max - x_min) * i / 5.0;
    const double px = sx(xv);
    out << "<line x1=\"" << num(px) << "\" y1=\"" << num(kMarginTop + plot_h) << "\" x2=\""
        << num(px) << "\" y2=\"" << num(kMarginTop + plot_h + 5) << "\" stroke=\"#444444\"/>\n";
    out << "<text x=\"" << num(px) << "\" y=\"" << num(kMarginTop + plot_h + 20)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
        << tick_label(xv) << "</text>\n";
  }
  // y ticks
  for (int i = 0; i <= 5; ++i) {
    const double yv = y_top * i / 5.0;
    const double py = sy(yv);
    out << "<line x1=\"" << num(kMarginLeft - 5) << "\" y1=\"" << num(py) << "\" x2=\""
        << num(kMarginLeft) << "\" y2=\"" << num(py) << "\" stroke=\"#444444\"/>\n";
    out << "<text x=\"" << num(kMarginLeft - 9) << "\" y=\"" << num(py + 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">"
        << tick_label(std::round(yv * 1000.0) / 1000.0) << "</text>\n";
  }
  out << "<text x=\"" << num(kMarginLeft + plot_w / 2) << "\" y=\"" << num(kHeight - 12)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">"
      << options.x_label << "</text>\n";
  out << "<text x=\"18\" y=\"" << num(kMarginTop + plot_h / 2)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" transform=\"rotate(-90 18 "
      << num(kMarginTop + plot_h / 2) << ")\">" << options.y_label << "</text>\n";

  for (const auto& s : series) {
    out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.6\"";
    if (s.dashed) out << " stroke-dasharray=\"7,4\"";
    out << " points=\"";
    for (const auto& [x, y] : s.points) out << num(sx(x)) << ',' << num(sy(y)) << ' ';
    out << "\"/>\n";
  }

  // legend, top-left inside the frame
  double ly = kMarginTop + 16.0;
  for (const auto& s : series) {
    out << "<line x1=\"" << num(kMarginLeft + 10) << "\" y1=\"" << num(ly - 4) << "\" x2=\""
        << num(kMarginLeft + 38) << "\" y2=\"" << num(ly - 4) << "\" stroke=\"" << s.color
        << "\" stroke-width=\"1.6\"" << (s.dashed ? " stroke-dasharray=\"7,4\"" : "") << "/>\n";
    out << "<text x=\"" << num(kMarginLeft + 44) << "\" y=\"" << num(ly)
        << "\" font-family=\"sans-serif\" font-size=\"12\">" << s.label << "</text>\n";
    ly += 16.0;
  }

  if (annotation) {
    const double px = sx(annotation->x);
    const double py = sy(annotation->y);
    out << "<circle cx=\"" << num(px) << "\" cy=\"" << num(py)
        << "\" r=\"3.5\" fill=\"none\" stroke=\"#cc0000\" stroke-width=\"1.4\"/>\n";
    out << "<text x=\"" << num(px + 8) << "\" y=\"" << num(py - 8)
        << "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"#cc0000\" data-x=\""
        << data_coord(annotation->x) << "\" data-y=\"" << data_coord(annotation->y) << "\">"
        << annotation->text << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace segtrial
