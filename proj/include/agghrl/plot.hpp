#pragma once
// Minimal SVG chart writer used by the `plot` subcommand: multi-series line
// plots (optionally log-scale y) and grouped bar charts, plus plain-text
// .dat column dumps for external tooling.

#include <string>
#include <vector>

namespace agghrl {

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct LinePlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_y = false;
  std::vector<PlotSeries> series;
};

struct BarGroup {
  std::string label;            // group along the x axis
  std::vector<double> values;   // one value per series
};

struct BarChartSpec {
  std::string title;
  std::string y_label;
  std::vector<std::string> series_labels;
  std::vector<BarGroup> groups;
};

std::string render_line_plot(const LinePlotSpec& spec);
std::string render_bar_chart(const BarChartSpec& spec);

void write_text_file(const std::string& path, const std::string& content);

// Two-plus-column numeric dump: header comment line, then one row per point.
std::string render_dat(const std::vector<std::string>& columns,
                       const std::vector<std::vector<double>>& rows);

// Downsamples a long series to at most `max_points` by averaging fixed-size
// chunks; keeps plots light and smooths noisy losses.
PlotSeries downsample_mean(const PlotSeries& s, std::size_t max_points);

}  // namespace agghrl
