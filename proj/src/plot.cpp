#include "agghrl/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace agghrl {

namespace {

constexpr int kWidth = 860;
constexpr int kHeight = 520;
constexpr int kMarginLeft = 70;
constexpr int kMarginRight = 170;
constexpr int kMarginTop = 48;
constexpr int kMarginBottom = 56;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
constexpr int kPaletteSize = 8;

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

struct Range {
  double lo = std::numeric_limits<double>::max();
  double hi = std::numeric_limits<double>::lowest();
  void include(double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  bool valid() const { return lo <= hi; }
};

std::vector<double> nice_ticks(double lo, double hi, int target) {
  if (!(hi > lo)) return {lo};
  double span = hi - lo;
  double raw = span / std::max(1, target);
  double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double norm = raw / mag;
  double step = (norm < 1.5 ? 1.0 : norm < 3.5 ? 2.0 : norm < 7.5 ? 5.0 : 10.0) * mag;
  std::vector<double> ticks;
  double first = std::ceil(lo / step) * step;
  for (double t = first; t <= hi + 0.5 * step; t += step) ticks.push_back(t);
  return ticks;
}

void svg_header(std::ostringstream& out, const std::string& title) {
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << kWidth / 2 << "\" y=\"28\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"17\">" << escape_xml(title) << "</text>\n";
}

void axes_box(std::ostringstream& out) {
  out << "<rect x=\"" << kMarginLeft << "\" y=\"" << kMarginTop << "\" width=\""
      << (kWidth - kMarginLeft - kMarginRight) << "\" height=\""
      << (kHeight - kMarginTop - kMarginBottom)
      << "\" fill=\"none\" stroke=\"#444\" stroke-width=\"1\"/>\n";
}

void axis_labels(std::ostringstream& out, const std::string& x_label,
                 const std::string& y_label) {
  out << "<text x=\"" << (kMarginLeft + (kWidth - kMarginLeft - kMarginRight) / 2) << "\" y=\""
      << (kHeight - 14) << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
      << "font-size=\"13\">" << escape_xml(x_label) << "</text>\n";
  out << "<text x=\"20\" y=\"" << (kMarginTop + (kHeight - kMarginTop - kMarginBottom) / 2)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
      << "transform=\"rotate(-90 20 "
      << (kMarginTop + (kHeight - kMarginTop - kMarginBottom) / 2) << ")\">"
      << escape_xml(y_label) << "</text>\n";
}

void legend(std::ostringstream& out, const std::vector<std::string>& labels) {
  int x = kWidth - kMarginRight + 14;
  int y = kMarginTop + 8;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const char* color = kPalette[i % kPaletteSize];
    out << "<rect x=\"" << x << "\" y=\"" << (y - 9) << "\" width=\"14\" height=\"10\" fill=\""
        << color << "\"/>\n";
    out << "<text x=\"" << (x + 20) << "\" y=\"" << y << "\" font-family=\"sans-serif\" "
        << "font-size=\"12\">" << escape_xml(labels[i]) << "</text>\n";
    y += 20;
  }
}

}  // namespace

PlotSeries downsample_mean(const PlotSeries& s, std::size_t max_points) {
  if (max_points == 0) throw std::invalid_argument("max_points must be positive");
  if (s.x.size() != s.y.size()) throw std::invalid_argument("series x/y length mismatch");
  if (s.x.size() <= max_points) return s;
  PlotSeries out;
  out.label = s.label;
  std::size_t chunk = (s.x.size() + max_points - 1) / max_points;
  for (std::size_t i = 0; i < s.x.size(); i += chunk) {
    std::size_t end = std::min(i + chunk, s.x.size());
    double sx = 0, sy = 0;
    for (std::size_t k = i; k < end; ++k) {
      sx += s.x[k];
      sy += s.y[k];
    }
    double n = static_cast<double>(end - i);
    out.x.push_back(sx / n);
    out.y.push_back(sy / n);
  }
  return out;
}

std::string render_line_plot(const LinePlotSpec& spec) {
  if (spec.series.empty()) throw std::invalid_argument("line plot needs at least one series");
  Range xr, yr;
  for (const PlotSeries& s : spec.series) {
    if (s.x.size() != s.y.size()) throw std::invalid_argument("series x/y length mismatch");
    if (s.x.empty()) throw std::invalid_argument("empty series: " + s.label);
    for (double v : s.x) xr.include(v);
    for (double v : s.y) {
      if (spec.log_y && v <= 0) continue;
      yr.include(spec.log_y ? std::log10(v) : v);
    }
  }
  if (!yr.valid()) throw std::invalid_argument("no plottable points (log scale needs y > 0)");
  if (xr.hi == xr.lo) xr.hi = xr.lo + 1;
  if (yr.hi == yr.lo) {
    yr.hi += 0.5;
    yr.lo -= 0.5;
  }
  double plot_w = kWidth - kMarginLeft - kMarginRight;
  double plot_h = kHeight - kMarginTop - kMarginBottom;
  auto px = [&](double x) { return kMarginLeft + (x - xr.lo) / (xr.hi - xr.lo) * plot_w; };
  auto py = [&](double y) { return kMarginTop + plot_h - (y - yr.lo) / (yr.hi - yr.lo) * plot_h; };

  std::ostringstream out;
  svg_header(out, spec.title);
  axes_box(out);

  for (double t : nice_ticks(xr.lo, xr.hi, 6)) {
    double x = px(t);
    out << "<line x1=\"" << fmt(x) << "\" y1=\"" << (kMarginTop + plot_h) << "\" x2=\"" << fmt(x)
        << "\" y2=\"" << (kMarginTop + plot_h + 5) << "\" stroke=\"#444\"/>\n";
    out << "<text x=\"" << fmt(x) << "\" y=\"" << (kMarginTop + plot_h + 20)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << fmt(t)
        << "</text>\n";
  }
  for (double t : nice_ticks(yr.lo, yr.hi, 6)) {
    double y = py(t);
    out << "<line x1=\"" << (kMarginLeft - 5) << "\" y1=\"" << fmt(y) << "\" x2=\"" << kMarginLeft
        << "\" y2=\"" << fmt(y) << "\" stroke=\"#444\"/>\n";
    out << "<line x1=\"" << kMarginLeft << "\" y1=\"" << fmt(y) << "\" x2=\""
        << (kMarginLeft + plot_w) << "\" y2=\"" << fmt(y)
        << "\" stroke=\"#ddd\" stroke-width=\"0.5\"/>\n";
    std::string label = spec.log_y ? ("1e" + fmt(t)) : fmt(t);
    out << "<text x=\"" << (kMarginLeft - 9) << "\" y=\"" << fmt(y + 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << label
        << "</text>\n";
  }

  std::vector<std::string> labels;
  for (std::size_t i = 0; i < spec.series.size(); ++i) {
    const PlotSeries& s = spec.series[i];
    labels.push_back(s.label);
    std::ostringstream pts;
    bool pen_down = false;
    out << "<path d=\"";
    for (std::size_t k = 0; k < s.x.size(); ++k) {
      double y = s.y[k];
      if (spec.log_y) {
        if (y <= 0) {
          pen_down = false;
          continue;
        }
        y = std::log10(y);
      }
      out << (pen_down ? "L" : "M") << fmt(px(s.x[k])) << " " << fmt(py(y)) << " ";
      pen_down = true;
    }
    out << "\" fill=\"none\" stroke=\"" << kPalette[i % kPaletteSize]
        << "\" stroke-width=\"1.6\"/>\n";
  }
  legend(out, labels);
  axis_labels(out, spec.x_label, spec.y_label);
  out << "</svg>\n";
  return out.str();
}

std::string render_bar_chart(const BarChartSpec& spec) {
  if (spec.groups.empty()) throw std::invalid_argument("bar chart needs at least one group");
  std::size_t n_series = spec.series_labels.size();
  if (n_series == 0) throw std::invalid_argument("bar chart needs at least one series");
  Range yr;
  yr.include(0.0);
  for (const BarGroup& g : spec.groups) {
    if (g.values.size() != n_series)
      throw std::invalid_argument("group " + g.label + " has wrong value count");
    for (double v : g.values) yr.include(v);
  }
  double plot_w = kWidth - kMarginLeft - kMarginRight;
  double plot_h = kHeight - kMarginTop - kMarginBottom;
  if (yr.hi == yr.lo) yr.hi = yr.lo + 1;
  auto py = [&](double y) { return kMarginTop + plot_h - (y - yr.lo) / (yr.hi - yr.lo) * plot_h; };

  std::ostringstream out;
  svg_header(out, spec.title);
  axes_box(out);
  for (double t : nice_ticks(yr.lo, yr.hi, 6)) {
    double y = py(t);
    out << "<line x1=\"" << (kMarginLeft - 5) << "\" y1=\"" << fmt(y) << "\" x2=\"" << kMarginLeft
        << "\" y2=\"" << fmt(y) << "\" stroke=\"#444\"/>\n";
    out << "<text x=\"" << (kMarginLeft - 9) << "\" y=\"" << fmt(y + 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << fmt(t)
        << "</text>\n";
  }

  double group_w = plot_w / static_cast<double>(spec.groups.size());
  double bar_w = group_w * 0.8 / static_cast<double>(n_series);
  double zero_y = py(std::max(0.0, yr.lo));
  for (std::size_t g = 0; g < spec.groups.size(); ++g) {
    double gx = kMarginLeft + group_w * (static_cast<double>(g) + 0.1);
    for (std::size_t s = 0; s < n_series; ++s) {
      double v = spec.groups[g].values[s];
      double top = py(std::max(v, 0.0));
      double h = std::fabs(py(v) - zero_y);
      out << "<rect x=\"" << fmt(gx + bar_w * static_cast<double>(s)) << "\" y=\"" << fmt(top)
          << "\" width=\"" << fmt(bar_w * 0.92) << "\" height=\"" << fmt(h) << "\" fill=\""
          << kPalette[s % kPaletteSize] << "\"/>\n";
    }
    out << "<text x=\"" << fmt(gx + group_w * 0.4) << "\" y=\"" << (kMarginTop + plot_h + 20)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
        << escape_xml(spec.groups[g].label) << "</text>\n";
  }
  legend(out, spec.series_labels);
  axis_labels(out, "", spec.y_label);
  out << "</svg>\n";
  return out.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::string render_dat(const std::vector<std::string>& columns,
                       const std::vector<std::vector<double>>& rows) {
  std::ostringstream out;
  out << "#";
  for (const std::string& c : columns) out << " " << c;
  out << "\n";
  for (const std::vector<double>& row : rows) {
    if (row.size() != columns.size()) throw std::invalid_argument("dat row width mismatch");
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? " " : "") << fmt(row[i]);
    out << "\n";
  }
  return out.str();
}

}  // namespace agghrl
