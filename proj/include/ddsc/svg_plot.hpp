#pragma once

#include <limits>
#include <string>
#include <vector>

namespace ddsc {

/// Minimal static line-chart writer (SVG). Enough for the trajectory plots:
/// one or two series against the time axis, shaded phase bands and an optional
/// horizontal threshold line.
class SvgPlot {
 public:
  SvgPlot(std::string title, std::string y_label, bool log_y = false)
      : title_(std::move(title)), y_label_(std::move(y_label)), log_y_(log_y) {}

  void add_series(std::string name, std::vector<double> ys, std::string color);
  /// Shaded vertical band covering [from, to) on the time axis.
  void add_band(double from, double to, std::string color);
  void set_threshold(double value, std::string label);

  std::string render() const;
  void write(const std::string& path) const;

 private:
  struct Series {
    std::string name;
    std::vector<double> ys;
    std::string color;
  };
  struct Band {
    double from, to;
    std::string color;
  };
  std::string title_, y_label_;
  bool log_y_;
  std::vector<Series> series_;
  std::vector<Band> bands_;
  double threshold_ = std::numeric_limits<double>::quiet_NaN();
  std::string threshold_label_;
};

}  // namespace ddsc
