#include <doctest.h>

#include "docsynth/errors.hpp"
#include "docsynth/layout.hpp"
#include "docsynth/rng.hpp"

using namespace docsynth;

namespace {

LayoutDocument simple_doc() {
  LayoutDocument d;
  d.page_width = 1000;
  d.page_height = 800;
  Region r;
  r.kind = RegionKind::printed_text;
  r.bbox = {10, 10, 900, 700};
  r.lines = {{"第一行", {20, 20, 400, 50}}, {"第二行", {20, 60, 400, 90}}};
  d.regions.push_back(r);
  return d;
}

}  // namespace

TEST_CASE("parse_layout accepts an empty document") {
  auto doc = parse_layout(
      R"({"schema_version":1,"page_width":100,"page_height":100,"regions":[]})");
  CHECK(doc.regions.empty());
  CHECK(splice_text(doc) == "");
  CHECK(kinds_present(doc).empty());
}

TEST_CASE("parse_layout types one region with two lines") {
  auto doc = parse_layout(serialize_layout(simple_doc()));
  REQUIRE(doc.regions.size() == 1);
  CHECK(doc.regions[0].lines.size() == 2);
  CHECK(kinds_present(doc) == std::set<RegionKind>{RegionKind::printed_text});
}

TEST_CASE("unknown region kind is a schema error at its path") {
  std::string bad =
      R"({"schema_version":1,"page_width":100,"page_height":100,)"
      R"("regions":[{"kind":"photo","bbox":[0,0,10,10],"lines":[]}]})";
  try {
    parse_layout(bad);
    FAIL("expected SchemaError");
  } catch (const SchemaError& e) {
    CHECK(e.path == "$.regions[0].kind");
    CHECK(std::string(e.what()).find("photo") != std::string::npos);
  }
}

TEST_CASE("out-of-bounds region rejected") {
  std::string bad =
      R"({"schema_version":1,"page_width":100,"page_height":100,)"
      R"("regions":[{"kind":"table","bbox":[0,0,150,50],"lines":[]}]})";
  CHECK_THROWS_AS(parse_layout(bad), SchemaError);
}

TEST_CASE("line box outside region tolerance rejected, jitter accepted") {
  LayoutDocument d = simple_doc();
  d.regions[0].lines[0].bbox = {8.5, 18.5, 400, 50};  // 1.5px outside, tolerated
  CHECK_NOTHROW(parse_layout(serialize_layout(d)));
  d.regions[0].lines[0].bbox = {5, 10, 400, 50};  // 5px outside
  CHECK_THROWS_AS(parse_layout(serialize_layout(d)), SchemaError);
}

TEST_CASE("splice orders top then left") {
  LayoutDocument d;
  d.page_width = 500;
  d.page_height = 500;
  Region r;
  r.kind = RegionKind::printed_text;
  r.bbox = {0, 0, 500, 500};
  r.lines = {{"B", {10, 10, 100, 30}}, {"A", {10, 5, 100, 25}}};
  d.regions.push_back(r);
  CHECK(splice_text(d) == "A\nB");
}

TEST_CASE("splice tie-breaks on left edge within a band") {
  LayoutDocument d;
  d.page_width = 500;
  d.page_height = 500;
  Region r;
  r.kind = RegionKind::printed_text;
  r.bbox = {0, 0, 500, 500};
  r.lines = {{"R", {300, 10, 400, 30}}, {"L", {10, 10, 100, 30}}};
  d.regions.push_back(r);
  CHECK(splice_text(d) == "L\nR");
}

TEST_CASE("splice is permutation invariant and conserves characters") {
  LayoutDocument d;
  d.page_width = 1000;
  d.page_height = 1000;
  Region r;
  r.kind = RegionKind::printed_text;
  r.bbox = {0, 0, 1000, 1000};
  Rng rng(5);
  for (int i = 0; i < 20; ++i) {
    double y = static_cast<double>(rng.uniform_int(0, 900));
    double x = static_cast<double>(rng.uniform_int(0, 800));
    r.lines.push_back({"line" + std::to_string(i), {x, y, x + 100, y + 20}});
  }
  d.regions.push_back(r);
  std::string canonical = splice_text(d);

  LayoutDocument shuffled = d;
  rng.shuffle(shuffled.regions[0].lines);
  CHECK(splice_text(shuffled) == canonical);

  // every line appears exactly once: total length accounts for all
  // characters plus the joining newlines
  size_t expected_len = 0;
  for (const auto& line : d.regions[0].lines) expected_len += line.text.size();
  expected_len += d.regions[0].lines.size() - 1;
  CHECK(canonical.size() == expected_len);
  for (int i = 0; i < 20; ++i) {
    std::string needle = "line" + std::to_string(i);
    size_t first = canonical.find(needle);
    REQUIRE(first != std::string::npos);
  }
}

TEST_CASE("serialize then parse is the identity") {
  LayoutDocument d = simple_doc();
  Region table;
  table.kind = RegionKind::table;
  table.bbox = {10, 710, 500, 790};
  table.lines = {{"单元格", {12, 712, 200, 740}}};
  d.regions.push_back(table);
  auto back = parse_layout(serialize_layout(d));
  CHECK(back == d);
  CHECK(serialize_layout(back) == serialize_layout(d));
}

TEST_CASE("all five kinds reported") {
  LayoutDocument d;
  d.page_width = 1000;
  d.page_height = 1000;
  double y = 0;
  for (RegionKind k : {RegionKind::printed_text, RegionKind::table,
                       RegionKind::chart, RegionKind::printed_formula,
                       RegionKind::seal}) {
    Region r;
    r.kind = k;
    r.bbox = {0, y, 100, y + 100};
    d.regions.push_back(r);
    y += 150;
  }
  CHECK(kinds_present(d).size() == 5);
}
