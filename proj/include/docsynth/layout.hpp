#pragma once

#include <array>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace docsynth {

enum class RegionKind { printed_text, table, chart, printed_formula, seal };

const char* to_string(RegionKind k);
std::optional<RegionKind> region_kind_from_string(const std::string& s);

// (x0, y0, x1, y1) in pixels, origin top-left.
using BBox = std::array<double, 4>;

struct TextLine {
  std::string text;
  BBox bbox{};
  bool operator==(const TextLine&) const = default;
};

struct Region {
  RegionKind kind = RegionKind::printed_text;
  BBox bbox{};
  std::vector<TextLine> lines;
  bool operator==(const Region&) const = default;
};

// Parsed OCR layout of a single page. Schema (version 1):
//   {"schema_version": 1, "page_width": W, "page_height": H,
//    "regions": [{"kind": "...", "bbox": [x0,y0,x1,y1],
//                 "lines": [{"text": "...", "bbox": [...]}]}]}
struct LayoutDocument {
  double page_width = 0;
  double page_height = 0;
  std::vector<Region> regions;
  bool operator==(const LayoutDocument&) const = default;
};

// Line boxes may stick out of their region by up to this much (OCR jitter).
inline constexpr double kLineBoxTolerancePx = 2.0;

// Throws SchemaError (with the JSON path) on unknown kinds, malformed
// boxes, or out-of-bounds geometry.
LayoutDocument parse_layout(const std::string& json_text);

// Stable bytes; parse_layout(serialize_layout(d)) == d.
std::string serialize_layout(const LayoutDocument& doc);

// All line texts in reading order: sort by top edge, then left edge,
// joined with single newlines.
std::string splice_text(const LayoutDocument& doc);

std::set<RegionKind> kinds_present(const LayoutDocument& doc);

}  // namespace docsynth
