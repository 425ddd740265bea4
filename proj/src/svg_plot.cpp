#include "ddsc/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "ddsc/errors.hpp"

namespace ddsc {

namespace {
constexpr double kWidth = 860.0;
constexpr double kHeight = 360.0;
constexpr double kMarginLeft = 70.0;
constexpr double kMarginRight = 20.0;
constexpr double kMarginTop = 36.0;
constexpr double kMarginBottom = 44.0;
}  // namespace

void SvgPlot::add_series(std::string name, std::vector<double> ys, std::string color) {
  series_.push_back({std::move(name), std::move(ys), std::move(color)});
}

void SvgPlot::add_band(double from, double to, std::string color) {
  bands_.push_back({from, to, std::move(color)});
}

void SvgPlot::set_threshold(double value, std::string label) {
  threshold_ = value;
  threshold_label_ = std::move(label);
}

std::string SvgPlot::render() const {
  double y_min = std::numeric_limits<double>::infinity();
  double y_max = -y_min;
  std::size_t n = 0;
  auto transform = [this](double v) {
    if (!log_y_) return v;
    return std::log10(std::max(v, 1e-16));
  };
  for (const auto& s : series_) {
    n = std::max(n, s.ys.size());
    for (double v : s.ys) {
      if (!std::isfinite(v)) continue;
      const double tv = transform(v);
      y_min = std::min(y_min, tv);
      y_max = std::max(y_max, tv);
    }
  }
  if (std::isfinite(threshold_)) {
    y_min = std::min(y_min, transform(threshold_));
    y_max = std::max(y_max, transform(threshold_));
  }
  if (!(y_max > y_min)) {
    y_max = y_min + 1.0;
  }
  const double pad = 0.05 * (y_max - y_min);
  y_min -= pad;
  y_max += pad;
  const double x_max = n > 1 ? static_cast<double>(n - 1) : 1.0;

  const double plot_w = kWidth - kMarginLeft - kMarginRight;
  const double plot_h = kHeight - kMarginTop - kMarginBottom;
  auto px = [&](double k) { return kMarginLeft + plot_w * (k / x_max); };
  auto py = [&](double v) {
    return kMarginTop + plot_h * (1.0 - (transform(v) - y_min) / (y_max - y_min));
  };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (const auto& b : bands_) {
    const double x0 = px(std::max(0.0, b.from));
    const double x1 = px(std::min(x_max, b.to));
    if (x1 <= x0) continue;
    svg << "<rect x=\"" << x0 << "\" y=\"" << kMarginTop << "\" width=\"" << (x1 - x0)
        << "\" height=\"" << plot_h << "\" fill=\"" << b.color << "\" fill-opacity=\"0.35\"/>\n";
  }
  svg << "<rect x=\"" << kMarginLeft << "\" y=\"" << kMarginTop << "\" width=\"" << plot_w
      << "\" height=\"" << plot_h << "\" fill=\"none\" stroke=\"#444\"/>\n";
  // Axis ticks.
  for (int i = 0; i <= 4; ++i) {
    const double frac = i / 4.0;
    const double ty = kMarginTop + plot_h * (1.0 - frac);
    const double val = y_min + frac * (y_max - y_min);
    svg << "<line x1=\"" << kMarginLeft - 4 << "\" y1=\"" << ty << "\" x2=\"" << kMarginLeft
        << "\" y2=\"" << ty << "\" stroke=\"#444\"/>\n";
    svg << "<text x=\"" << kMarginLeft - 8 << "\" y=\"" << ty + 4
        << "\" font-size=\"11\" text-anchor=\"end\">";
    if (log_y_)
      svg << "1e" << static_cast<int>(std::round(val));
    else
      svg << val;
    svg << "</text>\n";
    const double tx = kMarginLeft + plot_w * frac;
    svg << "<line x1=\"" << tx << "\" y1=\"" << kHeight - kMarginBottom << "\" x2=\"" << tx
        << "\" y2=\"" << kHeight - kMarginBottom + 4 << "\" stroke=\"#444\"/>\n";
    svg << "<text x=\"" << tx << "\" y=\"" << kHeight - kMarginBottom + 18
        << "\" font-size=\"11\" text-anchor=\"middle\">" << static_cast<int>(frac * x_max)
        << "</text>\n";
  }
  svg << "<text x=\"" << kWidth / 2 << "\" y=\"20\" font-size=\"14\" text-anchor=\"middle\">"
      << title_ << "</text>\n";
  svg << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 8
      << "\" font-size=\"12\" text-anchor=\"middle\">k</text>\n";
  svg << "<text x=\"16\" y=\"" << kHeight / 2
      << "\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 16 " << kHeight / 2
      << ")\">" << y_label_ << "</text>\n";

  if (std::isfinite(threshold_)) {
    const double ty = py(threshold_);
    svg << "<line x1=\"" << kMarginLeft << "\" y1=\"" << ty << "\" x2=\"" << kWidth - kMarginRight
        << "\" y2=\"" << ty << "\" stroke=\"#c02020\" stroke-dasharray=\"6 4\"/>\n";
    svg << "<text x=\"" << kWidth - kMarginRight - 4 << "\" y=\"" << ty - 4
        << "\" font-size=\"11\" text-anchor=\"end\" fill=\"#c02020\">" << threshold_label_
        << "</text>\n";
  }

  double legend_x = kMarginLeft + 8;
  for (const auto& s : series_) {
    svg << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.4\" points=\"";
    for (std::size_t i = 0; i < s.ys.size(); ++i) {
      if (!std::isfinite(s.ys[i])) continue;
      svg << px(static_cast<double>(i)) << "," << py(s.ys[i]) << " ";
    }
    svg << "\"/>\n";
    svg << "<rect x=\"" << legend_x << "\" y=\"" << kMarginTop + 6 << "\" width=\"12\" height=\"4\" fill=\""
        << s.color << "\"/>\n";
    svg << "<text x=\"" << legend_x + 16 << "\" y=\"" << kMarginTop + 12 << "\" font-size=\"11\">"
        << s.name << "</text>\n";
    legend_x += 18.0 * 2 + 7.0 * s.name.size();
  }
  svg << "</svg>\n";
  return svg.str();
}

void SvgPlot::write(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw ConfigError("SvgPlot: cannot write " + path);
  out << render();
}

}  // namespace ddsc
