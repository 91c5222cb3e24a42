#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "portlab/backtest/records.hpp"
#include "portlab/dates.hpp"
#include "portlab/errors.hpp"

namespace portlab::report {

struct PlotSeries {
  std::string label;
  std::vector<backtest::BacktestRecord> records;
};

namespace detail {

inline std::string px(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

inline std::string sig3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

inline std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '&') out += "&amp;";
    else if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else out += c;
  }
  return out;
}

inline std::string date_label(int64_t unix_seconds) {
  CivilDate d = civil_from_days(utc_day_index(unix_seconds));
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", d.year, d.month, d.day);
  return buf;
}

}  // namespace detail

// accumulated wealth over time on a log scale, one polyline per series.
// pure function of its input: same records, same bytes.
inline std::string emit_plot_svg(const std::vector<PlotSeries>& series) {
  if (series.empty()) throw validation_error("plot: no series");
  for (const auto& s : series)
    if (s.records.empty()) throw validation_error("plot: series '" + s.label + "' is empty");

  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                  "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
  const double W = 960, H = 540, left = 72, right = 16, top = 18, bottom = 46;
  const double plot_w = W - left - right, plot_h = H - top - bottom;

  int64_t x_lo = series[0].records.front().timestamp, x_hi = x_lo;
  double y_lo = 0.0, y_hi = 0.0;  // log10 of wealth; the unit start is always on-axis
  for (const auto& s : series)
    for (const auto& rec : s.records) {
      x_lo = std::min(x_lo, rec.timestamp);
      x_hi = std::max(x_hi, rec.timestamp);
      if (!(rec.p > 0.0)) throw validation_error("plot: nonpositive portfolio value");
      y_lo = std::min(y_lo, std::log10(rec.p));
      y_hi = std::max(y_hi, std::log10(rec.p));
    }
  if (x_hi == x_lo) x_hi = x_lo + 1;
  double pad = 0.05 * std::max(y_hi - y_lo, 1e-3);
  y_lo -= pad;
  y_hi += pad;

  auto sx = [&](int64_t t) { return left + plot_w * double(t - x_lo) / double(x_hi - x_lo); };
  auto sy = [&](double logp) { return top + plot_h * (y_hi - logp) / (y_hi - y_lo); };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"960\" height=\"540\" "
         "viewBox=\"0 0 960 540\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg += "<rect width=\"960\" height=\"540\" fill=\"white\"/>\n";

  // gridlines and axis labels: five ticks each way
  for (int k = 0; k <= 4; ++k) {
    double logp = y_lo + (y_hi - y_lo) * k / 4.0;
    std::string y = detail::px(sy(logp));
    svg += "<line x1=\"" + detail::px(left) + "\" y1=\"" + y + "\" x2=\"" + detail::px(W - right) +
           "\" y2=\"" + y + "\" stroke=\"#dddddd\"/>\n";
    svg += "<text x=\"" + detail::px(left - 6) + "\" y=\"" + y +
           "\" text-anchor=\"end\" dominant-baseline=\"middle\">" +
           detail::sig3(std::pow(10.0, logp)) + "</text>\n";

    int64_t t = x_lo + (x_hi - x_lo) * k / 4;
    std::string x = detail::px(sx(t));
    svg += "<line x1=\"" + x + "\" y1=\"" + detail::px(top) + "\" x2=\"" + x + "\" y2=\"" +
           detail::px(H - bottom) + "\" stroke=\"#eeeeee\"/>\n";
    svg += "<text x=\"" + x + "\" y=\"" + detail::px(H - bottom + 16) +
           "\" text-anchor=\"middle\">" + detail::date_label(t) + "</text>\n";
  }
  // the break-even line at wealth 1
  if (0.0 > y_lo && 0.0 < y_hi) {
    std::string y = detail::px(sy(0.0));
    svg += "<line x1=\"" + detail::px(left) + "\" y1=\"" + y + "\" x2=\"" + detail::px(W - right) +
           "\" y2=\"" + y + "\" stroke=\"#999999\" stroke-dasharray=\"4 3\"/>\n";
  }
  svg += "<rect x=\"" + detail::px(left) + "\" y=\"" + detail::px(top) + "\" width=\"" +
         detail::px(plot_w) + "\" height=\"" + detail::px(plot_h) +
         "\" fill=\"none\" stroke=\"#333333\"/>\n";
  svg += "<text x=\"" + detail::px(left + plot_w / 2) + "\" y=\"" + detail::px(H - 8) +
         "\" text-anchor=\"middle\">time (UTC)</text>\n";
  svg += "<text x=\"16\" y=\"" + detail::px(top + plot_h / 2) +
         "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " + detail::px(top + plot_h / 2) +
         ")\">accumulated wealth (log scale)</text>\n";

  for (size_t i = 0; i < series.size(); ++i) {
    const char* color = palette[i % (sizeof palette / sizeof palette[0])];
    std::string points;
    for (const auto& rec : series[i].records)
      points += detail::px(sx(rec.timestamp)) + "," + detail::px(sy(std::log10(rec.p))) + " ";
    if (!points.empty()) points.pop_back();
    svg += "<polyline points=\"" + points + "\" fill=\"none\" stroke=\"" + color +
           "\" stroke-width=\"1.5\"/>\n";

    // legend entry, top-left, in input order
    double ly = top + 10 + 18.0 * double(i);
    svg += "<rect x=\"" + detail::px(left + 10) + "\" y=\"" + detail::px(ly - 5) +
           "\" width=\"14\" height=\"4\" fill=\"" + std::string(color) + "\"/>\n";
    svg += "<text x=\"" + detail::px(left + 30) + "\" y=\"" + detail::px(ly + 2) + "\">" +
           detail::xml_escape(series[i].label) + "</text>\n";
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace portlab::report
