#pragma once

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "daglab/dagger.hpp"
#include "daglab/dubins_env.hpp"
#include "daglab/errors.hpp"

namespace daglab {

// Affine map from data coordinates to pixel coordinates.
struct AxisMap {
  double d0 = 0.0, d1 = 1.0;  // data range
  double p0 = 0.0, p1 = 1.0;  // pixel range
  double operator()(double v) const { return p0 + (v - d0) * (p1 - p0) / (d1 - d0); }
};

namespace svgdetail {

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

inline const std::vector<std::string>& palette() {
  static const std::vector<std::string> colors = {
      "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};
  return colors;
}

}  // namespace svgdetail

// Fixed plot geometry, exposed so the pixel positions of data points can be
// recomputed independently of the renderer.
struct PanelGeometry {
  double width = 420.0;
  double height = 340.0;
  double margin_left = 58.0;
  double margin_right = 14.0;
  double margin_top = 34.0;
  double margin_bottom = 44.0;

  AxisMap x_map(double lo, double hi) const {
    return AxisMap{lo, hi, margin_left, width - margin_right};
  }
  AxisMap y_map(double lo, double hi) const {
    // pixel y grows downward
    return AxisMap{lo, hi, height - margin_bottom, margin_top};
  }
};

// One curve: y value per epoch (x = 0..n-1).
struct Curve {
  std::string label;
  std::vector<double> values;
};

namespace svgdetail {

inline void render_panel(std::ostringstream& out, const PanelGeometry& g, double x_off,
                         const std::string& title, const std::string& x_label,
                         const std::string& y_label, const std::vector<Curve>& curves) {
  int max_n = 0;
  double lo = 0.0, hi = 0.0;
  bool any = false;
  for (const Curve& c : curves) {
    max_n = std::max(max_n, static_cast<int>(c.values.size()));
    for (double v : c.values) {
      lo = any ? std::min(lo, v) : v;
      hi = any ? std::max(hi, v) : v;
      any = true;
    }
  }
  if (!any) throw ConfigError("render_panel: empty curves");
  if (hi - lo < 1e-12) {
    lo -= 1.0;
    hi += 1.0;
  } else {
    const double pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;
  }
  const double x_hi = std::max(1, max_n - 1);
  const AxisMap xm = g.x_map(0.0, x_hi);
  const AxisMap ym = g.y_map(lo, hi);

  out << "<g transform=\"translate(" << fmt(x_off) << ",0)\">\n";
  out << "<rect x=\"" << fmt(g.margin_left) << "\" y=\"" << fmt(g.margin_top) << "\" width=\""
      << fmt(g.width - g.margin_left - g.margin_right) << "\" height=\""
      << fmt(g.height - g.margin_top - g.margin_bottom)
      << "\" fill=\"none\" stroke=\"#444\" stroke-width=\"1\"/>\n";
  out << "<text x=\"" << fmt(g.width / 2.0) << "\" y=\"20\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"14\" font-weight=\"bold\">" << title
      << "</text>\n";
  out << "<text x=\"" << fmt(g.width / 2.0) << "\" y=\"" << fmt(g.height - 10.0)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << x_label
      << "</text>\n";
  out << "<text x=\"14\" y=\"" << fmt(g.height / 2.0) << "\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"12\" transform=\"rotate(-90 14 "
      << fmt(g.height / 2.0) << ")\">" << y_label << "</text>\n";

  const int n_ticks = 5;
  for (int k = 0; k < n_ticks; ++k) {
    const double xv = x_hi * k / (n_ticks - 1);
    const double px = xm(xv);
    out << "<line x1=\"" << fmt(px) << "\" y1=\"" << fmt(ym(lo)) << "\" x2=\"" << fmt(px)
        << "\" y2=\"" << fmt(ym(lo) + 4) << "\" stroke=\"#444\"/>\n";
    char label[32];
    std::snprintf(label, sizeof label, "%.3g", xv);
    out << "<text x=\"" << fmt(px) << "\" y=\"" << fmt(ym(lo) + 16)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">" << label
        << "</text>\n";
    const double yv = lo + (hi - lo) * k / (n_ticks - 1);
    const double py = ym(yv);
    out << "<line x1=\"" << fmt(xm(0.0) - 4) << "\" y1=\"" << fmt(py) << "\" x2=\""
        << fmt(xm(0.0)) << "\" y2=\"" << fmt(py) << "\" stroke=\"#444\"/>\n";
    std::snprintf(label, sizeof label, "%.3g", yv);
    out << "<text x=\"" << fmt(xm(0.0) - 7) << "\" y=\"" << fmt(py + 3)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">" << label
        << "</text>\n";
  }

  for (size_t c = 0; c < curves.size(); ++c) {
    const Curve& curve = curves[c];
    if (curve.values.empty()) continue;
    out << "<polyline fill=\"none\" stroke=\"" << palette()[c % palette().size()]
        << "\" stroke-width=\"1.8\" points=\"";
    for (size_t k = 0; k < curve.values.size(); ++k) {
      if (k) out << ' ';
      out << fmt(xm(static_cast<double>(k))) << ',' << fmt(ym(curve.values[k]));
    }
    out << "\"/>\n";
  }
  out << "</g>\n";
}

}  // namespace svgdetail

// Two-panel (safety / learning) line chart, one polyline per algorithm.
inline std::string render_curves_svg(const std::vector<Curve>& safety,
                                     const std::vector<Curve>& learning) {
  if (safety.empty() || learning.empty())
    throw ConfigError("render_curves: empty results table");
  const PanelGeometry g;
  const double legend_w = 170.0;
  const double total_w = 2.0 * g.width + legend_w;
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << svgdetail::fmt(total_w)
      << "\" height=\"" << svgdetail::fmt(g.height) << "\" viewBox=\"0 0 "
      << svgdetail::fmt(total_w) << ' ' << svgdetail::fmt(g.height) << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svgdetail::render_panel(out, g, 0.0, "Safety Performance", "DAgger Epoch",
                          "Avg. Total Return", safety);
  svgdetail::render_panel(out, g, g.width, "Learning Performance", "DAgger Epoch",
                          "Avg. Total Return", learning);
  // legend
  const double lx = 2.0 * g.width + 12.0;
  for (size_t c = 0; c < safety.size(); ++c) {
    const double ly = g.margin_top + 8.0 + 20.0 * c;
    out << "<line x1=\"" << svgdetail::fmt(lx) << "\" y1=\"" << svgdetail::fmt(ly) << "\" x2=\""
        << svgdetail::fmt(lx + 22.0) << "\" y2=\"" << svgdetail::fmt(ly) << "\" stroke=\""
        << svgdetail::palette()[c % svgdetail::palette().size()] << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << svgdetail::fmt(lx + 28.0) << "\" y=\"" << svgdetail::fmt(ly + 4.0)
        << "\" font-family=\"sans-serif\" font-size=\"11\">" << safety[c].label << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

// Room outline (walls with the exit gap) plus the driven path.
inline std::string render_replay_svg(const std::vector<TrajectoryRow>& rows, double room_size,
                                     double exit_width) {
  if (rows.empty()) throw ConfigError("render_replay: empty trajectory");
  const double pix = 520.0;
  const double margin = 30.0;
  const AxisMap xm{0.0, room_size, margin, pix - margin};
  const AxisMap ym{0.0, room_size, pix - margin, margin};  // y up

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << pix << "\" height=\"" << pix
      << "\" viewBox=\"0 0 " << pix << ' ' << pix << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  const double lo = room_size / 2.0 - exit_width / 2.0;
  const double hi = room_size / 2.0 + exit_width / 2.0;
  const WallSegment walls[] = {{0, 0, room_size, 0},
                               {0, 0, 0, room_size},
                               {room_size, 0, room_size, room_size},
                               {0, room_size, lo, room_size},
                               {hi, room_size, room_size, room_size}};
  for (const WallSegment& w : walls)
    out << "<line x1=\"" << svgdetail::fmt(xm(w.x1)) << "\" y1=\"" << svgdetail::fmt(ym(w.y1))
        << "\" x2=\"" << svgdetail::fmt(xm(w.x2)) << "\" y2=\"" << svgdetail::fmt(ym(w.y2))
        << "\" stroke=\"#222\" stroke-width=\"3\"/>\n";

  // path colored by actor: expert-controlled steps blue, novice red
  for (size_t k = 0; k + 1 < rows.size(); ++k)
    out << "<line x1=\"" << svgdetail::fmt(xm(rows[k].x)) << "\" y1=\""
        << svgdetail::fmt(ym(rows[k].y)) << "\" x2=\"" << svgdetail::fmt(xm(rows[k + 1].x))
        << "\" y2=\"" << svgdetail::fmt(ym(rows[k + 1].y)) << "\" stroke=\""
        << (rows[k].actor == Actor::Expert ? "#1f77b4" : "#d62728")
        << "\" stroke-width=\"1.6\"/>\n";

  out << "<circle cx=\"" << svgdetail::fmt(xm(rows.front().x)) << "\" cy=\""
      << svgdetail::fmt(ym(rows.front().y)) << "\" r=\"4\" fill=\"#2ca02c\"/>\n";
  out << "<circle cx=\"" << svgdetail::fmt(xm(rows.back().x)) << "\" cy=\""
      << svgdetail::fmt(ym(rows.back().y)) << "\" r=\"4\" fill=\"#000\"/>\n";
  out << "</svg>\n";
  return out.str();
}

}  // namespace daglab
