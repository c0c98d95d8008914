#include <algorithm>
#include <cmath>

#include "docsynth/chart.hpp"
#include "docsynth/errors.hpp"
#include "docsynth/text.hpp"

// SVG coordinates: origin top-left, y grows down. The canvas splits into
// a title band, an optional legend block, the plot area and axis margins.
// All text is emitted with explicit anchors and absolute coordinates so
// the linter can recompute every box from the output alone.

namespace docsynth {

namespace {

constexpr double kTitleFontPx = 18;
constexpr double kLabelFontPx = 12;
constexpr double kAnnotationFontPx = 12;
constexpr double kLegendSwatchPx = 12;
constexpr double kLegendPadPx = 6;

double glyph_width(char32_t cp, double font_px) {
  return text::is_cjk(cp) ? font_px : font_px * 0.6;
}

double text_width_px(const std::string& s, double font_px) {
  double w = 0;
  for (char32_t cp : text::decode_utf8(s)) w += glyph_width(cp, font_px);
  return w;
}

std::string esc(const std::string& s) {
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

std::string num(double v) {
  double r = std::round(v * 100.0) / 100.0;
  if (r == 0.0) r = 0.0;
  return text::format_double(r);
}

struct SvgWriter {
  std::string out;

  void open(int w, int h) {
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
           std::to_string(w) + "\" height=\"" + std::to_string(h) +
           "\" viewBox=\"0 0 " + std::to_string(w) + " " + std::to_string(h) +
           "\">\n";
    rect(0, 0, w, h, "#FFFFFF", "", 0);
  }
  void close() { out += "</svg>\n"; }

  void rect(double x, double y, double w, double h, const std::string& fill,
            const std::string& stroke, double stroke_w) {
    out += "<rect x=\"" + num(x) + "\" y=\"" + num(y) + "\" width=\"" + num(w) +
           "\" height=\"" + num(h) + "\" fill=\"" + (fill.empty() ? "none" : fill) +
           "\"";
    if (!stroke.empty())
      out += " stroke=\"" + stroke + "\" stroke-width=\"" + num(stroke_w) + "\"";
    out += "/>\n";
  }

  void line(double x1, double y1, double x2, double y2, const std::string& stroke,
            double stroke_w) {
    out += "<line x1=\"" + num(x1) + "\" y1=\"" + num(y1) + "\" x2=\"" + num(x2) +
           "\" y2=\"" + num(y2) + "\" stroke=\"" + stroke + "\" stroke-width=\"" +
           num(stroke_w) + "\"/>\n";
  }

  void circle(double cx, double cy, double r, const std::string& fill) {
    out += "<circle cx=\"" + num(cx) + "\" cy=\"" + num(cy) + "\" r=\"" + num(r) +
           "\" fill=\"" + fill + "\"/>\n";
  }

  void polyline(const std::vector<std::pair<double, double>>& pts,
                const std::string& stroke, double stroke_w,
                const std::string& fill = "none") {
    out += "<polyline points=\"";
    for (size_t i = 0; i < pts.size(); ++i) {
      if (i) out += ' ';
      out += num(pts[i].first) + "," + num(pts[i].second);
    }
    out += "\" fill=\"" + fill + "\" stroke=\"" + stroke + "\" stroke-width=\"" +
           num(stroke_w) + "\"/>\n";
  }

  void polygon(const std::vector<std::pair<double, double>>& pts,
               const std::string& fill, double opacity = 1.0) {
    out += "<polygon points=\"";
    for (size_t i = 0; i < pts.size(); ++i) {
      if (i) out += ' ';
      out += num(pts[i].first) + "," + num(pts[i].second);
    }
    out += "\" fill=\"" + fill + "\"";
    if (opacity < 1.0) out += " fill-opacity=\"" + num(opacity) + "\"";
    out += "/>\n";
  }

  void path(const std::string& d, const std::string& fill) {
    out += "<path d=\"" + d + "\" fill=\"" + fill + "\"/>\n";
  }

  // anchor: start | middle | end
  void label(double x, double y, double font_px, const std::string& anchor,
             const std::string& fill, const std::string& content,
             const std::string& id = "") {
    out += "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" font-size=\"" +
           num(font_px) + "\" font-family=\"sans-serif\" text-anchor=\"" + anchor +
           "\" fill=\"" + fill + "\"";
    if (!id.empty()) out += " id=\"" + id + "\"";
    out += ">" + esc(content) + "</text>\n";
  }
};

struct NiceScale {
  double lo = 0, hi = 1, step = 0.25;
};

NiceScale nice_scale(double lo, double hi) {
  if (lo > 0) lo = 0;  // bars and areas are anchored at zero
  if (hi < 0) hi = 0;
  if (hi == lo) hi = lo + 1;
  double span = hi - lo;
  double raw_step = span / 5.0;
  double mag = std::pow(10.0, std::floor(std::log10(raw_step)));
  double norm = raw_step / mag;
  double step = (norm <= 1 ? 1 : norm <= 2 ? 2 : norm <= 5 ? 5 : 10) * mag;
  NiceScale s;
  s.step = step;
  s.lo = std::floor(lo / step) * step;
  s.hi = std::ceil(hi / step) * step;
  if (s.hi == s.lo) s.hi = s.lo + step;
  return s;
}

struct LegendMetrics {
  double width = 0, height = 0;
};

LegendMetrics legend_metrics(const ChartSpec& spec) {
  LegendMetrics m;
  if (spec.legend_position == LegendPosition::none) return m;
  double max_label = 0;
  for (const auto& s : spec.series)
    max_label = std::max(max_label, text_width_px(s.label, kLabelFontPx));
  bool horizontal = spec.legend_position == LegendPosition::bottom ||
                    spec.legend_position == LegendPosition::top_center;
  double entry_h = std::max(kLegendSwatchPx, kLabelFontPx) + kLegendPadPx;
  if (horizontal) {
    double entry_w = kLegendSwatchPx + 4 + max_label + 2 * kLegendPadPx;
    m.width = entry_w * static_cast<double>(spec.series.size());
    m.height = entry_h;
  } else {
    m.width = kLegendSwatchPx + 4 + max_label + 2 * kLegendPadPx;
    m.height = entry_h * static_cast<double>(spec.series.size()) + kLegendPadPx;
  }
  return m;
}

struct Frame {
  double x0, y0, x1, y1;  // plot area
  double legend_x, legend_y;
  double w, h;
};

Frame compute_frame(const ChartSpec& spec, const LegendMetrics& lm) {
  Frame f{};
  f.w = spec.width_px;
  f.h = spec.height_px;
  double top = spec.title.empty() ? 16 : kTitleFontPx * 2 + 8;
  double bottom = 48;
  double left = 64;
  double right = 24;
  if (spec.chart_type == ChartType::heatmap) {
    double max_row_label = 0;
    for (const auto& s : spec.series)
      max_row_label = std::max(max_row_label, text_width_px(s.label, kLabelFontPx));
    left = std::max(left, max_row_label + 16);
  }

  switch (spec.legend_position) {
    case LegendPosition::right:
      f.legend_x = f.w - lm.width - 4;
      f.legend_y = top + 8;
      right = lm.width + 16;
      break;
    case LegendPosition::top_right:
      f.legend_x = f.w - lm.width - 8;
      f.legend_y = top;
      top += lm.height + 4;
      break;
    case LegendPosition::top_left:
      f.legend_x = left;
      f.legend_y = top;
      top += lm.height + 4;
      break;
    case LegendPosition::top_center:
      // pinned to the top band; collides with a centered title, which the
      // linter reports rather than the renderer silently avoiding
      f.legend_x = (f.w - lm.width) / 2;
      f.legend_y = 12;
      top = std::max(top, f.legend_y + lm.height + 4);
      break;
    case LegendPosition::bottom:
      f.legend_x = (f.w - lm.width) / 2;
      f.legend_y = f.h - lm.height - 2;
      bottom += lm.height + 6;
      break;
    case LegendPosition::none:
      break;
  }
  f.x0 = left;
  f.y0 = top;
  f.x1 = f.w - right;
  f.y1 = f.h - bottom;
  if (f.x1 - f.x0 < 40 || f.y1 - f.y0 < 40)
    throw Error("canvas too small for the plot frame");
  return f;
}

void draw_legend(SvgWriter& svg, const ChartSpec& spec, const Frame& f) {
  if (spec.legend_position == LegendPosition::none) return;
  svg.out += "<g id=\"legend\">\n";
  bool horizontal = spec.legend_position == LegendPosition::bottom ||
                    spec.legend_position == LegendPosition::top_center;
  double entry_h = std::max(kLegendSwatchPx, kLabelFontPx) + kLegendPadPx;
  double x = f.legend_x + kLegendPadPx;
  double y = f.legend_y;
  for (size_t i = 0; i < spec.series.size(); ++i) {
    svg.rect(x, y + 2, kLegendSwatchPx, kLegendSwatchPx, spec.colors[i], "#333333",
             0.5);
    svg.label(x + kLegendSwatchPx + 4, y + kLegendSwatchPx, kLabelFontPx, "start",
              "#333333", spec.series[i].label);
    if (horizontal)
      x += kLegendSwatchPx + 4 + text_width_px(spec.series[i].label, kLabelFontPx) +
           2 * kLegendPadPx;
    else
      y += entry_h;
  }
  svg.out += "</g>\n";
}

void draw_axes(SvgWriter& svg, const Frame& f, const NiceScale& scale,
               const ChartSpec& spec) {
  svg.line(f.x0, f.y0, f.x0, f.y1, "#333333", 1);
  svg.line(f.x0, f.y1, f.x1, f.y1, "#333333", 1);
  for (int i = 0;; ++i) {
    double v = scale.lo + i * scale.step;
    if (v > scale.hi + scale.step / 2) break;
    double t = (v - scale.lo) / (scale.hi - scale.lo);
    double y = f.y1 - t * (f.y1 - f.y0);
    svg.line(f.x0 - 4, y, f.x0, y, "#333333", 1);
    if (i > 0) svg.line(f.x0, y, f.x1, y, "#DDDDDD", 0.5);
    // scrub accumulated binary noise so ticks print as short decimals
    double shown = std::round(v * 1e10) / 1e10;
    svg.label(f.x0 - 8, y + kLabelFontPx / 3, kLabelFontPx, "end", "#333333",
              text::format_double(shown));
  }
  if (!spec.x_label.empty())
    svg.label((f.x0 + f.x1) / 2, f.y1 + 36, kLabelFontPx, "middle", "#333333",
              spec.x_label);
  if (!spec.y_label.empty())
    svg.label(f.x0, f.y0 - 6, kLabelFontPx, "start", "#333333", spec.y_label);
}

void draw_category_ticks(SvgWriter& svg, const Frame& f, const ChartSpec& spec) {
  size_t n = spec.categories.size();
  double slot = (f.x1 - f.x0) / static_cast<double>(n);
  for (size_t i = 0; i < n; ++i) {
    double cx = f.x0 + slot * (static_cast<double>(i) + 0.5);
    svg.label(cx, f.y1 + kLabelFontPx + 4, kLabelFontPx, "middle", "#333333",
              spec.categories[i]);
  }
}

std::pair<double, double> value_range(const ChartSpec& spec) {
  double lo = 0, hi = 0;
  bool first = true;
  if (spec.chart_type == ChartType::stacked_bar) {
    for (size_t i = 0; i < spec.categories.size(); ++i) {
      double total = 0;
      for (const auto& s : spec.series) total += s.values[i];
      if (first) { lo = hi = total; first = false; }
      lo = std::min(lo, total);
      hi = std::max(hi, total);
    }
    lo = std::min(lo, 0.0);
  } else {
    for (const auto& s : spec.series)
      for (double v : s.values) {
        if (first) { lo = hi = v; first = false; }
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
  }
  return {lo, hi};
}

std::string shade_color(const std::string& base, double t) {
  auto hexv = [](char c) {
    return c <= '9' ? c - '0' : (c | 0x20) - 'a' + 10;
  };
  int r = hexv(base[1]) * 16 + hexv(base[2]);
  int g = hexv(base[3]) * 16 + hexv(base[4]);
  int b = hexv(base[5]) * 16 + hexv(base[6]);
  auto mix = [&](int c) { return static_cast<int>(255 + (c - 255) * t); };
  char buf[8];
  std::snprintf(buf, sizeof(buf), "#%02X%02X%02X", mix(r), mix(g), mix(b));
  return buf;
}

}  // namespace

std::string render(const ChartSpec& spec, uint64_t rng_seed) {
  validate_spec(spec);
  SvgWriter svg;
  svg.open(spec.width_px, spec.height_px);
  svg.out += "<!-- seed:" + std::to_string(rng_seed) + " -->\n";

  LegendMetrics lm = legend_metrics(spec);
  Frame f = compute_frame(spec, lm);

  if (!spec.title.empty())
    svg.label(spec.width_px / 2.0, kTitleFontPx + 6, kTitleFontPx, "middle",
              "#111111", spec.title, "title");

  const auto [vlo, vhi] = value_range(spec);
  NiceScale scale = nice_scale(vlo, vhi);
  auto y_of = [&](double v) {
    double t = (v - scale.lo) / (scale.hi - scale.lo);
    return f.y1 - t * (f.y1 - f.y0);
  };

  switch (spec.chart_type) {
    case ChartType::bar:
    case ChartType::histogram: {
      draw_axes(svg, f, scale, spec);
      draw_category_ticks(svg, f, spec);
      size_t n = spec.categories.size();
      size_t k = spec.series.size();
      double slot = (f.x1 - f.x0) / static_cast<double>(n);
      double gap = spec.chart_type == ChartType::histogram ? 1.0 : slot * 0.2;
      double bar_w = (slot - gap) / static_cast<double>(k);
      for (size_t i = 0; i < n; ++i)
        for (size_t s = 0; s < k; ++s) {
          double v = spec.series[s].values[i];
          double x = f.x0 + slot * static_cast<double>(i) + gap / 2 +
                     bar_w * static_cast<double>(s);
          double y = y_of(std::max(v, 0.0));
          double h = std::fabs(y_of(0) - y_of(v));
          svg.rect(x, y, bar_w, h, spec.colors[s], "#333333", 0.5);
        }
      break;
    }
    case ChartType::stacked_bar: {
      draw_axes(svg, f, scale, spec);
      draw_category_ticks(svg, f, spec);
      size_t n = spec.categories.size();
      double slot = (f.x1 - f.x0) / static_cast<double>(n);
      double bar_w = slot * 0.6;
      for (size_t i = 0; i < n; ++i) {
        double acc = 0;
        double x = f.x0 + slot * (static_cast<double>(i) + 0.5) - bar_w / 2;
        for (size_t s = 0; s < spec.series.size(); ++s) {
          double v = std::max(spec.series[s].values[i], 0.0);
          double y_top = y_of(acc + v);
          double y_bot = y_of(acc);
          svg.rect(x, y_top, bar_w, y_bot - y_top, spec.colors[s], "#333333", 0.5);
          acc += v;
        }
      }
      break;
    }
    case ChartType::line:
    case ChartType::area: {
      draw_axes(svg, f, scale, spec);
      draw_category_ticks(svg, f, spec);
      size_t n = spec.categories.size();
      double slot = (f.x1 - f.x0) / static_cast<double>(n);
      for (size_t s = 0; s < spec.series.size(); ++s) {
        std::vector<std::pair<double, double>> pts;
        for (size_t i = 0; i < n; ++i)
          pts.emplace_back(f.x0 + slot * (static_cast<double>(i) + 0.5),
                           y_of(spec.series[s].values[i]));
        if (spec.chart_type == ChartType::area) {
          auto poly = pts;
          poly.emplace_back(pts.back().first, y_of(std::max(0.0, scale.lo)));
          poly.emplace_back(pts.front().first, y_of(std::max(0.0, scale.lo)));
          svg.polygon(poly, spec.colors[s], 0.45);
        }
        svg.polyline(pts, spec.colors[s], 2);
        for (const auto& [px, py] : pts) svg.circle(px, py, 2.5, spec.colors[s]);
      }
      break;
    }
    case ChartType::scatter: {
      draw_axes(svg, f, scale, spec);
      double xlo = *std::min_element(spec.xs.begin(), spec.xs.end());
      double xhi = *std::max_element(spec.xs.begin(), spec.xs.end());
      if (xhi == xlo) xhi = xlo + 1;
      auto x_of = [&](double x) {
        return f.x0 + (x - xlo) / (xhi - xlo) * (f.x1 - f.x0);
      };
      for (size_t s = 0; s < spec.series.size(); ++s)
        for (size_t i = 0; i < spec.xs.size(); ++i)
          svg.circle(x_of(spec.xs[i]), y_of(spec.series[s].values[i]), 3.5,
                     spec.colors[s]);
      break;
    }
    case ChartType::pie: {
      const auto& values = spec.series[0].values;
      double total = 0;
      for (double v : values) total += v;
      double cx = (f.x0 + f.x1) / 2, cy = (f.y0 + f.y1) / 2;
      double max_label = 0;
      for (const auto& c : spec.categories)
        max_label = std::max(max_label, text_width_px(c, kLabelFontPx));
      double radius = std::min((f.x1 - f.x0) / 2 - max_label - 12,
                               (f.y1 - f.y0) / 2 - kLabelFontPx * 1.5 - 8);
      if (radius < 20) radius = 20;
      double angle = -90;  // start at 12 o'clock
      for (size_t i = 0; i < values.size(); ++i) {
        double sweep = total > 0 ? values[i] / total * 360.0 : 360.0 / values.size();
        double a0 = angle * M_PI / 180, a1 = (angle + sweep) * M_PI / 180;
        double x0 = cx + radius * std::cos(a0), y0 = cy + radius * std::sin(a0);
        double x1 = cx + radius * std::cos(a1), y1 = cy + radius * std::sin(a1);
        int large = sweep > 180 ? 1 : 0;
        std::string d = "M " + num(cx) + " " + num(cy) + " L " + num(x0) + " " +
                        num(y0) + " A " + num(radius) + " " + num(radius) +
                        " 0 " + std::to_string(large) + " 1 " + num(x1) + " " +
                        num(y1) + " Z";
        svg.path(d, shade_color(spec.colors[0], 0.25 + 0.75 * (i + 1.0) /
                                                     values.size()));
        double mid = (angle + sweep / 2) * M_PI / 180;
        double lx = cx + (radius + 4) * std::cos(mid);
        double ly = cy + (radius + 4) * std::sin(mid);
        bool left_side = std::cos(mid) < -0.15;
        bool right_side = std::cos(mid) > 0.15;
        svg.label(lx, ly + kLabelFontPx / 3, kLabelFontPx,
                  right_side ? "start" : left_side ? "end" : "middle", "#333333",
                  spec.categories[i]);
        angle += sweep;
      }
      break;
    }
    case ChartType::box: {
      draw_axes(svg, f, scale, spec);
      draw_category_ticks(svg, f, spec);
      size_t n = spec.categories.size();
      double slot = (f.x1 - f.x0) / static_cast<double>(n);
      double box_w = slot * 0.4;
      for (size_t i = 0; i < n; ++i) {
        double cx = f.x0 + slot * (static_cast<double>(i) + 0.5);
        double lo = spec.series[0].values[i], q1 = spec.series[1].values[i];
        double med = spec.series[2].values[i], q3 = spec.series[3].values[i];
        double hi = spec.series[4].values[i];
        svg.line(cx, y_of(lo), cx, y_of(q1), "#333333", 1);
        svg.line(cx, y_of(q3), cx, y_of(hi), "#333333", 1);
        svg.line(cx - box_w / 4, y_of(lo), cx + box_w / 4, y_of(lo), "#333333", 1);
        svg.line(cx - box_w / 4, y_of(hi), cx + box_w / 4, y_of(hi), "#333333", 1);
        svg.rect(cx - box_w / 2, y_of(q3), box_w, y_of(q1) - y_of(q3),
                 spec.colors[0], "#333333", 1);
        svg.line(cx - box_w / 2, y_of(med), cx + box_w / 2, y_of(med), "#111111", 1.5);
      }
      break;
    }
    case ChartType::heatmap: {
      size_t n_cols = spec.categories.size();
      size_t n_rows = spec.series.size();
      double cell_w = (f.x1 - f.x0) / static_cast<double>(n_cols);
      double cell_h = (f.y1 - f.y0) / static_cast<double>(n_rows);
      double lo = vlo, hi = vhi == vlo ? vlo + 1 : vhi;
      for (size_t r = 0; r < n_rows; ++r) {
        for (size_t c = 0; c < n_cols; ++c) {
          double v = spec.series[r].values[c];
          double t = (v - lo) / (hi - lo);
          svg.rect(f.x0 + cell_w * c, f.y0 + cell_h * r, cell_w, cell_h,
                   shade_color(spec.colors[0], 0.15 + 0.85 * t), "#FFFFFF", 1);
          svg.label(f.x0 + cell_w * (c + 0.5), f.y0 + cell_h * r + cell_h / 2 +
                        kLabelFontPx / 3, kLabelFontPx, "middle",
                    t > 0.6 ? "#FFFFFF" : "#333333",
                    text::format_double(v));
        }
        svg.label(f.x0 - 8, f.y0 + cell_h * r + cell_h / 2 + kLabelFontPx / 3,
                  kLabelFontPx, "end", "#333333", spec.series[r].label);
      }
      for (size_t c = 0; c < n_cols; ++c)
        svg.label(f.x0 + cell_w * (c + 0.5), f.y1 + kLabelFontPx + 4, kLabelFontPx,
                  "middle", "#333333", spec.categories[c]);
      break;
    }
  }

  if (spec.chart_type != ChartType::heatmap) draw_legend(svg, spec, f);

  for (const auto& a : spec.annotations)
    svg.label(a.ax * spec.width_px, a.ay * spec.height_px, kAnnotationFontPx,
              "middle", "#555555", a.text);

  svg.close();
  return svg.out;
}

}  // namespace docsynth
