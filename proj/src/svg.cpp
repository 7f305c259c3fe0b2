#include "predsaddle/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <vector>

namespace predsaddle {

namespace {

constexpr double kWidth = 800, kHeight = 600;
constexpr double kLeft = 70, kRight = 30, kTop = 40, kBottom = 50;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

struct Axis {
  double lo = 0, hi = 1;
  bool log = false;

  double unit(double v) const {
    const double a = log ? std::log10(v) : v;
    const double l = log ? std::log10(lo) : lo;
    const double h = log ? std::log10(hi) : hi;
    return h > l ? (a - l) / (h - l) : 0.5;
  }
};

std::string num_label(double v) {
  // Trim the round-trip form a little for tick labels.
  std::string s = format_double(v);
  if (s.size() > 10) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    s = buf;
  }
  return s;
}

std::vector<double> ticks(const Axis& axis, int target = 5) {
  std::vector<double> out;
  if (axis.log) {
    const int e_lo = static_cast<int>(std::floor(std::log10(axis.lo)));
    const int e_hi = static_cast<int>(std::ceil(std::log10(axis.hi)));
    int stride = std::max(1, (e_hi - e_lo) / target);
    for (int e = e_lo; e <= e_hi; e += stride) {
      const double v = std::pow(10.0, e);
      if (v >= axis.lo / 1.0001 && v <= axis.hi * 1.0001) out.push_back(v);
    }
    return out;
  }
  const double span = axis.hi - axis.lo;
  if (!(span > 0)) return {axis.lo};
  const double raw = span / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    if (raw <= m * mag) {
      step = m * mag;
      break;
    }
  }
  const double start = std::ceil(axis.lo / step) * step;
  for (double v = start; v <= axis.hi + step * 1e-9; v += step) out.push_back(v);
  return out;
}

Axis make_axis(double lo, double hi, bool log) {
  Axis axis;
  axis.log = log;
  if (log) {
    if (!(lo > 0)) lo = 1e-12;
    if (!(hi > lo)) hi = lo * 10;
  } else if (!(hi > lo)) {
    hi = lo + 1;
    lo -= 1;
  }
  axis.lo = lo;
  axis.hi = hi;
  return axis;
}

std::string fmt_coord(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

}  // namespace

std::string render_plot(const CsvTable& table, const PlotOptions& opts) {
  if (table.columns.size() < 2) throw CsvError("plot needs at least two columns");
  if (table.rows.empty()) throw CsvError("plot needs at least one data row");

  const size_t x_col = opts.kind == PlotKind::scatter ? table.columns.size() - 2 : 0;
  std::vector<size_t> y_cols;
  if (opts.kind == PlotKind::scatter) {
    y_cols.push_back(table.columns.size() - 1);
  } else {
    for (size_t c = 1; c < table.columns.size(); ++c) y_cols.push_back(c);
  }

  auto usable = [&](double x, double y) {
    if (!std::isfinite(x) || !std::isfinite(y)) return false;
    if (opts.log_x && !(x > 0)) return false;
    if (opts.log_y && !(y > 0)) return false;
    return true;
  };

  double x_lo = std::numeric_limits<double>::infinity(), x_hi = -x_lo;
  double y_lo = x_lo, y_hi = -x_lo;
  for (const auto& row : table.rows) {
    for (size_t c : y_cols) {
      if (!usable(row[x_col], row[c])) continue;
      x_lo = std::min(x_lo, row[x_col]);
      x_hi = std::max(x_hi, row[x_col]);
      y_lo = std::min(y_lo, row[c]);
      y_hi = std::max(y_hi, row[c]);
    }
  }
  if (!std::isfinite(x_lo)) throw CsvError("plot has no finite data points");

  const Axis xa = make_axis(x_lo, x_hi, opts.log_x);
  const Axis ya = make_axis(y_lo, y_hi, opts.log_y);
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  auto px = [&](double v) { return kLeft + xa.unit(v) * plot_w; };
  auto py = [&](double v) { return kHeight - kBottom - ya.unit(v) * plot_h; };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 800 600\" "
         "font-family=\"sans-serif\" font-size=\"12\">\n";
  svg += "<rect width=\"800\" height=\"600\" fill=\"white\"/>\n";
  if (!opts.title.empty())
    svg += "<text x=\"400\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" + opts.title +
           "</text>\n";

  // frame + ticks
  svg += "<rect x=\"" + fmt_coord(kLeft) + "\" y=\"" + fmt_coord(kTop) + "\" width=\"" +
         fmt_coord(plot_w) + "\" height=\"" + fmt_coord(plot_h) +
         "\" fill=\"none\" stroke=\"black\"/>\n";
  for (double t : ticks(xa)) {
    const double x = px(t);
    svg += "<line x1=\"" + fmt_coord(x) + "\" y1=\"" + fmt_coord(kHeight - kBottom) + "\" x2=\"" +
           fmt_coord(x) + "\" y2=\"" + fmt_coord(kHeight - kBottom + 5) + "\" stroke=\"black\"/>\n";
    svg += "<text x=\"" + fmt_coord(x) + "\" y=\"" + fmt_coord(kHeight - kBottom + 18) +
           "\" text-anchor=\"middle\">" + num_label(t) + "</text>\n";
  }
  for (double t : ticks(ya)) {
    const double y = py(t);
    svg += "<line x1=\"" + fmt_coord(kLeft - 5) + "\" y1=\"" + fmt_coord(y) + "\" x2=\"" +
           fmt_coord(kLeft) + "\" y2=\"" + fmt_coord(y) + "\" stroke=\"black\"/>\n";
    svg += "<text x=\"" + fmt_coord(kLeft - 8) + "\" y=\"" + fmt_coord(y + 4) +
           "\" text-anchor=\"end\">" + num_label(t) + "</text>\n";
  }
  svg += "<text x=\"" + fmt_coord(kLeft + plot_w / 2) + "\" y=\"" + fmt_coord(kHeight - 12) +
         "\" text-anchor=\"middle\">" + table.columns[x_col] + "</text>\n";

  // series
  for (size_t si = 0; si < y_cols.size(); ++si) {
    const size_t c = y_cols[si];
    const char* color = kPalette[si % (sizeof(kPalette) / sizeof(kPalette[0]))];
    if (opts.kind == PlotKind::line) {
      std::string points;
      for (const auto& row : table.rows) {
        if (!usable(row[x_col], row[c])) continue;
        points += fmt_coord(px(row[x_col])) + "," + fmt_coord(py(row[c])) + " ";
      }
      svg += "<polyline fill=\"none\" stroke=\"" + std::string(color) +
             "\" stroke-width=\"1.5\" points=\"" + points + "\"/>\n";
    } else {
      for (const auto& row : table.rows) {
        if (!usable(row[x_col], row[c])) continue;
        svg += "<circle cx=\"" + fmt_coord(px(row[x_col])) + "\" cy=\"" +
               fmt_coord(py(row[c])) + "\" r=\"2\" fill=\"" + color + "\"/>\n";
      }
    }
    // legend
    const double ly = kTop + 16 + 16 * static_cast<double>(si);
    svg += "<line x1=\"" + fmt_coord(kWidth - kRight - 130) + "\" y1=\"" + fmt_coord(ly - 4) +
           "\" x2=\"" + fmt_coord(kWidth - kRight - 110) + "\" y2=\"" + fmt_coord(ly - 4) +
           "\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
    svg += "<text x=\"" + fmt_coord(kWidth - kRight - 104) + "\" y=\"" + fmt_coord(ly) + "\">" +
           table.columns[c] + "</text>\n";
  }
  svg += "</svg>\n";
  return svg;
}

void emit_plot(const std::filesystem::path& csv_path, const PlotOptions& opts,
               const std::filesystem::path& out_svg) {
  const CsvTable table = read_csv(csv_path);
  const std::string svg = render_plot(table, opts);
  std::ofstream f(out_svg, std::ios::binary);
  if (!f) throw CsvError("cannot open for writing: " + out_svg.string());
  f << svg;
  if (!f) throw CsvError("write failed: " + out_svg.string());
}

}  // namespace predsaddle
