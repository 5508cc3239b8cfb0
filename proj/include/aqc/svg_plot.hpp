#pragma once

// Static SVG 1.1 line charts of sweep CSV columns against T.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "aqc/csv.hpp"
#include "aqc/error.hpp"

namespace aqc {

struct PlotLayout {
  double width = 800.0;
  double height = 480.0;
  double margin_left = 70.0;
  double margin_right = 130.0;
  double margin_top = 20.0;
  double margin_bottom = 50.0;
  int ticks = 5;
};

namespace detail {

inline std::string fixed2(double v) {
  if (v == 0.0) v = 0.0;  // drop the sign of -0
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 2);
  std::string s(buf, res.ptr);
  return s == "-0.00" ? "0.00" : s;
}

inline std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace detail

// Renders the named columns as polylines over the T column. NaN values
// split a series into separate segments.
inline std::string render_svg(const CsvTable& table, const std::vector<std::string>& columns,
                              const PlotLayout& layout = {}) {
  if (columns.empty()) throw InvalidArgument("plot needs at least one column");
  if (table.rows.empty()) throw MalformedCsv("malformed CSV at line 2: no data rows");
  const std::size_t tcol = table.column("T");
  std::vector<std::size_t> cols;
  for (const auto& c : columns) cols.push_back(table.column(c));

  double tmin = std::numeric_limits<double>::infinity(), tmax = -tmin;
  double ymin = tmin, ymax = -tmin;
  for (const auto& row : table.rows) {
    tmin = std::min(tmin, row[tcol]);
    tmax = std::max(tmax, row[tcol]);
    for (std::size_t c : cols) {
      if (!std::isfinite(row[c])) continue;
      ymin = std::min(ymin, row[c]);
      ymax = std::max(ymax, row[c]);
    }
  }
  if (!std::isfinite(ymin)) {
    ymin = -1.0;
    ymax = 1.0;
  }
  if (ymax - ymin < 1e-12) {
    ymin -= 0.5;
    ymax += 0.5;
  }
  if (tmax - tmin < 1e-12) tmax = tmin + 1.0;

  const double x0 = layout.margin_left, x1 = layout.width - layout.margin_right;
  const double y0 = layout.height - layout.margin_bottom, y1 = layout.margin_top;
  auto px = [&](double t) { return x0 + (t - tmin) / (tmax - tmin) * (x1 - x0); };
  auto py = [&](double v) { return y0 + (v - ymin) / (ymax - ymin) * (y1 - y0); };

  static constexpr std::string_view palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                                 "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};
  using detail::fixed2;
  std::string svg;
  svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" +
         fixed2(layout.width) + "\" height=\"" + fixed2(layout.height) + "\">\n";
  svg += "<rect x=\"0\" y=\"0\" width=\"" + fixed2(layout.width) + "\" height=\"" +
         fixed2(layout.height) + "\" fill=\"white\"/>\n";
  svg += "<g stroke=\"black\" stroke-width=\"1\" fill=\"none\">\n";
  svg += "<line x1=\"" + fixed2(x0) + "\" y1=\"" + fixed2(y0) + "\" x2=\"" + fixed2(x1) +
         "\" y2=\"" + fixed2(y0) + "\"/>\n";
  svg += "<line x1=\"" + fixed2(x0) + "\" y1=\"" + fixed2(y0) + "\" x2=\"" + fixed2(x0) +
         "\" y2=\"" + fixed2(y1) + "\"/>\n";
  svg += "</g>\n";

  svg += "<g font-family=\"sans-serif\" font-size=\"12\" fill=\"black\">\n";
  for (int i = 0; i <= layout.ticks; ++i) {
    const double f = static_cast<double>(i) / layout.ticks;
    const double t = tmin + f * (tmax - tmin), v = ymin + f * (ymax - ymin);
    svg += "<line x1=\"" + fixed2(px(t)) + "\" y1=\"" + fixed2(y0) + "\" x2=\"" + fixed2(px(t)) +
           "\" y2=\"" + fixed2(y0 + 5) + "\" stroke=\"black\"/>\n";
    svg += "<text x=\"" + fixed2(px(t)) + "\" y=\"" + fixed2(y0 + 18) +
           "\" text-anchor=\"middle\">" + format_number(t, 4) + "</text>\n";
    svg += "<line x1=\"" + fixed2(x0 - 5) + "\" y1=\"" + fixed2(py(v)) + "\" x2=\"" + fixed2(x0) +
           "\" y2=\"" + fixed2(py(v)) + "\" stroke=\"black\"/>\n";
    svg += "<text x=\"" + fixed2(x0 - 8) + "\" y=\"" + fixed2(py(v) + 4) +
           "\" text-anchor=\"end\">" + format_number(v, 4) + "</text>\n";
  }
  svg += "<text x=\"" + fixed2(0.5 * (x0 + x1)) + "\" y=\"" + fixed2(layout.height - 10) +
         "\" text-anchor=\"middle\">T</text>\n";
  svg += "</g>\n";

  for (std::size_t k = 0; k < cols.size(); ++k) {
    const std::string_view colour = palette[k % std::size(palette)];
    svg += "<g fill=\"none\" stroke=\"" + std::string(colour) + "\" stroke-width=\"1.2\">\n";
    std::string points;
    auto flush = [&] {
      if (!points.empty()) svg += "<polyline points=\"" + points + "\"/>\n";
      points.clear();
    };
    for (const auto& row : table.rows) {
      const double v = row[cols[k]];
      if (!std::isfinite(v)) {
        flush();
        continue;
      }
      if (!points.empty()) points += ' ';
      points += fixed2(px(row[tcol])) + "," + fixed2(py(v));
    }
    flush();
    svg += "</g>\n";

    const double ly = layout.margin_top + 10 + 18.0 * static_cast<double>(k);
    svg += "<line x1=\"" + fixed2(x1 + 15) + "\" y1=\"" + fixed2(ly) + "\" x2=\"" + fixed2(x1 + 40) +
           "\" y2=\"" + fixed2(ly) + "\" stroke=\"" + std::string(colour) + "\" stroke-width=\"2\"/>\n";
    svg += "<text x=\"" + fixed2(x1 + 46) + "\" y=\"" + fixed2(ly + 4) +
           "\" font-family=\"sans-serif\" font-size=\"12\">" +
           detail::xml_escape(table.header[cols[k]]) + "</text>\n";
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace aqc
