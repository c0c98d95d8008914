#include <cmath>
#include <optional>

#include "docsynth/chart.hpp"
#include "docsynth/errors.hpp"
#include "docsynth/text.hpp"

// The linter works from the rendered bytes, not the renderer's layout
// code: it re-parses every <text> element (and the legend group) and
// recomputes boxes with the same glyph-width model the renderer used for
// sizing. Diagnostics therefore reflect what was actually emitted.

namespace docsynth {

namespace {

struct TextElem {
  double x = 0, y = 0, font = 12;
  std::string anchor = "start";
  std::string content;
  std::string id;
  bool in_legend = false;
};

struct RectElem {
  double x = 0, y = 0, w = 0, h = 0;
  bool in_legend = false;
};

std::optional<std::string> attr(const std::string& tag, const std::string& name) {
  std::string needle = name + "=\"";
  auto pos = tag.find(needle);
  if (pos == std::string::npos) return std::nullopt;
  pos += needle.size();
  auto end = tag.find('"', pos);
  if (end == std::string::npos) return std::nullopt;
  return tag.substr(pos, end - pos);
}

double attr_num(const std::string& tag, const std::string& name, double fallback) {
  auto v = attr(tag, name);
  return v ? std::strtod(v->c_str(), nullptr) : fallback;
}

std::string unescape(const std::string& s) {
  std::string out;
  size_t i = 0;
  while (i < s.size()) {
    if (s[i] == '&') {
      if (s.compare(i, 5, "&amp;") == 0) { out += '&'; i += 5; continue; }
      if (s.compare(i, 4, "&lt;") == 0) { out += '<'; i += 4; continue; }
      if (s.compare(i, 4, "&gt;") == 0) { out += '>'; i += 4; continue; }
      if (s.compare(i, 6, "&quot;") == 0) { out += '"'; i += 6; continue; }
    }
    out += s[i++];
  }
  return out;
}

double glyph_width(char32_t cp, double font_px) {
  return text::is_cjk(cp) ? font_px : font_px * 0.6;
}

double text_width_px(const std::string& s, double font_px) {
  double w = 0;
  for (char32_t cp : text::decode_utf8(s)) w += glyph_width(cp, font_px);
  return w;
}

struct Box {
  double x0 = 0, y0 = 0, x1 = 0, y1 = 0;
  bool valid = false;

  void grow(const Box& other) {
    if (!other.valid) return;
    if (!valid) { *this = other; return; }
    x0 = std::min(x0, other.x0);
    y0 = std::min(y0, other.y0);
    x1 = std::max(x1, other.x1);
    y1 = std::max(y1, other.y1);
  }
  bool intersects(const Box& o) const {
    return valid && o.valid && x0 < o.x1 && o.x0 < x1 && y0 < o.y1 && o.y0 < y1;
  }
};

Box text_box(const TextElem& t) {
  double w = text_width_px(t.content, t.font);
  Box b;
  if (t.anchor == "middle") { b.x0 = t.x - w / 2; b.x1 = t.x + w / 2; }
  else if (t.anchor == "end") { b.x0 = t.x - w; b.x1 = t.x; }
  else { b.x0 = t.x; b.x1 = t.x + w; }
  b.y0 = t.y - 0.8 * t.font;
  b.y1 = t.y + 0.25 * t.font;
  b.valid = true;
  return b;
}

}  // namespace

std::vector<std::string> lint_layout(const ChartSpec& spec,
                                     const std::string& svg) {
  std::vector<std::string> diagnostics;
  double width = 0, height = 0;
  {
    auto open = svg.find("<svg ");
    if (open == std::string::npos) {
      diagnostics.push_back("not an svg document");
      return diagnostics;
    }
    auto end = svg.find('>', open);
    std::string tag = svg.substr(open, end - open);
    width = attr_num(tag, "width", 0);
    height = attr_num(tag, "height", 0);
  }
  if (width <= 0 || height <= 0) {
    diagnostics.push_back("missing canvas dimensions");
    return diagnostics;
  }

  std::vector<TextElem> texts;
  std::vector<RectElem> rects;
  bool in_legend = false;
  size_t i = 0;
  while (i < svg.size()) {
    if (svg[i] != '<') { ++i; continue; }
    if (svg.compare(i, 14, "<g id=\"legend\"") == 0) {
      in_legend = true;
      i = svg.find('>', i) + 1;
      continue;
    }
    if (in_legend && svg.compare(i, 4, "</g>") == 0) {
      in_legend = false;
      i += 4;
      continue;
    }
    if (svg.compare(i, 6, "<text ") == 0) {
      auto tag_end = svg.find('>', i);
      auto close = svg.find("</text>", tag_end);
      std::string tag = svg.substr(i, tag_end - i);
      TextElem t;
      t.x = attr_num(tag, "x", 0);
      t.y = attr_num(tag, "y", 0);
      t.font = attr_num(tag, "font-size", 12);
      if (auto a = attr(tag, "text-anchor")) t.anchor = *a;
      if (auto id = attr(tag, "id")) t.id = *id;
      t.content = unescape(svg.substr(tag_end + 1, close - tag_end - 1));
      t.in_legend = in_legend;
      texts.push_back(std::move(t));
      i = close + 7;
      continue;
    }
    if (svg.compare(i, 6, "<rect ") == 0) {
      auto tag_end = svg.find('>', i);
      std::string tag = svg.substr(i, tag_end - i);
      RectElem r;
      r.x = attr_num(tag, "x", 0);
      r.y = attr_num(tag, "y", 0);
      r.w = attr_num(tag, "width", 0);
      r.h = attr_num(tag, "height", 0);
      r.in_legend = in_legend;
      rects.push_back(r);
      i = tag_end + 1;
      continue;
    }
    ++i;
  }

  const double slack = 0.5;  // sub-pixel rounding forgiveness
  Box canvas{-slack, -slack, width + slack, height + slack, true};
  Box legend_box, title_box;

  for (const auto& t : texts) {
    Box b = text_box(t);
    if (t.in_legend) legend_box.grow(b);
    if (t.id == "title") title_box = b;
    if (b.x0 < canvas.x0 || b.y0 < canvas.y0 || b.x1 > canvas.x1 ||
        b.y1 > canvas.y1) {
      std::string snippet = t.content.substr(0, 40);
      diagnostics.push_back("text out of bounds: \"" + snippet + "\"");
    }
  }
  for (const auto& r : rects) {
    if (!r.in_legend) continue;
    Box b{r.x, r.y, r.x + r.w, r.y + r.h, true};
    legend_box.grow(b);
  }

  if (legend_box.valid &&
      (legend_box.x0 < canvas.x0 || legend_box.y0 < canvas.y0 ||
       legend_box.x1 > canvas.x1 || legend_box.y1 > canvas.y1))
    diagnostics.push_back("legend clipped by canvas");

  if (legend_box.valid && title_box.valid && legend_box.intersects(title_box))
    diagnostics.push_back("legend overlaps title");

  (void)spec;
  return diagnostics;
}

}  // namespace docsynth
