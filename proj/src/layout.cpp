#include "docsynth/layout.hpp"

#include <algorithm>
#include <tuple>

#include <nlohmann/json.hpp>

#include "docsynth/errors.hpp"
#include "docsynth/text.hpp"

namespace docsynth {

using nlohmann::json;
using nlohmann::ordered_json;

const char* to_string(RegionKind k) {
  switch (k) {
    case RegionKind::printed_text: return "printed_text";
    case RegionKind::table: return "table";
    case RegionKind::chart: return "chart";
    case RegionKind::printed_formula: return "printed_formula";
    case RegionKind::seal: return "seal";
  }
  return "printed_text";
}

std::optional<RegionKind> region_kind_from_string(const std::string& s) {
  if (s == "printed_text") return RegionKind::printed_text;
  if (s == "table") return RegionKind::table;
  if (s == "chart") return RegionKind::chart;
  if (s == "printed_formula") return RegionKind::printed_formula;
  if (s == "seal") return RegionKind::seal;
  return std::nullopt;
}

namespace {

BBox parse_bbox(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 4)
    throw SchemaError(path, "bbox must be an array of 4 numbers");
  BBox b;
  for (size_t i = 0; i < 4; ++i) {
    if (!j[i].is_number()) throw SchemaError(path + "[" + std::to_string(i) + "]", "not a number");
    b[i] = j[i].get<double>();
  }
  if (!(b[0] < b[2]) || !(b[1] < b[3]))
    throw SchemaError(path, "degenerate bbox: x0<x1 and y0<y1 required");
  return b;
}

bool inside(const BBox& inner, const BBox& outer, double tol) {
  return inner[0] >= outer[0] - tol && inner[1] >= outer[1] - tol &&
         inner[2] <= outer[2] + tol && inner[3] <= outer[3] + tol;
}

}  // namespace

LayoutDocument parse_layout(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw SchemaError("$", std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw SchemaError("$", "layout must be a JSON object");
  if (!j.contains("schema_version") || !j["schema_version"].is_number_integer())
    throw SchemaError("$.schema_version", "missing or non-integer");
  if (j["schema_version"].get<int>() != 1)
    throw SchemaError("$.schema_version",
                      "unsupported version " + j["schema_version"].dump());

  LayoutDocument doc;
  for (const char* key : {"page_width", "page_height"}) {
    if (!j.contains(key) || !j[key].is_number())
      throw SchemaError(std::string("$.") + key, "missing or non-numeric");
  }
  doc.page_width = j["page_width"].get<double>();
  doc.page_height = j["page_height"].get<double>();
  if (doc.page_width <= 0 || doc.page_height <= 0)
    throw SchemaError("$.page_width", "page dimensions must be positive");

  if (!j.contains("regions") || !j["regions"].is_array())
    throw SchemaError("$.regions", "missing or not an array");
  BBox page{0, 0, doc.page_width, doc.page_height};
  for (size_t ri = 0; ri < j["regions"].size(); ++ri) {
    const std::string rpath = "$.regions[" + std::to_string(ri) + "]";
    const json& rj = j["regions"][ri];
    if (!rj.is_object()) throw SchemaError(rpath, "region must be an object");
    Region region;
    if (!rj.contains("kind") || !rj["kind"].is_string())
      throw SchemaError(rpath + ".kind", "missing or non-string");
    auto kind = region_kind_from_string(rj["kind"].get<std::string>());
    if (!kind)
      throw SchemaError(rpath + ".kind",
                        "unknown region kind \"" + rj["kind"].get<std::string>() + "\"");
    region.kind = *kind;
    region.bbox = parse_bbox(rj.at("bbox"), rpath + ".bbox");
    if (!inside(region.bbox, page, 0.0))
      throw SchemaError(rpath + ".bbox", "region outside page bounds");
    if (rj.contains("lines")) {
      if (!rj["lines"].is_array()) throw SchemaError(rpath + ".lines", "not an array");
      for (size_t li = 0; li < rj["lines"].size(); ++li) {
        const std::string lpath = rpath + ".lines[" + std::to_string(li) + "]";
        const json& lj = rj["lines"][li];
        if (!lj.is_object() || !lj.contains("text") || !lj["text"].is_string())
          throw SchemaError(lpath + ".text", "missing or non-string");
        TextLine line;
        line.text = lj["text"].get<std::string>();
        line.bbox = parse_bbox(lj.at("bbox"), lpath + ".bbox");
        if (!inside(line.bbox, region.bbox, kLineBoxTolerancePx))
          throw SchemaError(lpath + ".bbox", "line box outside region bbox");
        region.lines.push_back(std::move(line));
      }
    }
    doc.regions.push_back(std::move(region));
  }
  return doc;
}

std::string serialize_layout(const LayoutDocument& doc) {
  ordered_json regions = ordered_json::array();
  for (const auto& r : doc.regions) {
    ordered_json lines = ordered_json::array();
    for (const auto& l : r.lines)
      lines.push_back(ordered_json{{"text", l.text},
                                   {"bbox", {l.bbox[0], l.bbox[1], l.bbox[2], l.bbox[3]}}});
    regions.push_back(ordered_json{{"kind", to_string(r.kind)},
                                   {"bbox", {r.bbox[0], r.bbox[1], r.bbox[2], r.bbox[3]}},
                                   {"lines", lines}});
  }
  ordered_json j{{"schema_version", 1},
                 {"page_width", doc.page_width},
                 {"page_height", doc.page_height},
                 {"regions", regions}};
  return j.dump();
}

std::string splice_text(const LayoutDocument& doc) {
  std::vector<const TextLine*> lines;
  for (const auto& r : doc.regions)
    for (const auto& l : r.lines) lines.push_back(&l);
  std::stable_sort(lines.begin(), lines.end(), [](const TextLine* a, const TextLine* b) {
    return std::tie(a->bbox[1], a->bbox[0], a->bbox[3], a->bbox[2], a->text) <
           std::tie(b->bbox[1], b->bbox[0], b->bbox[3], b->bbox[2], b->text);
  });
  std::string out;
  for (size_t i = 0; i < lines.size(); ++i) {
    if (i) out += '\n';
    out += lines[i]->text;
  }
  return out;
}

std::set<RegionKind> kinds_present(const LayoutDocument& doc) {
  std::set<RegionKind> kinds;
  for (const auto& r : doc.regions) kinds.insert(r.kind);
  return kinds;
}

}  // namespace docsynth
