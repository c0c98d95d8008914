#include <doctest.h>

#include "docsynth/csv.hpp"
#include "docsynth/errors.hpp"
#include "docsynth/rng.hpp"
#include "docsynth/text.hpp"

using namespace docsynth;

TEST_CASE("nfkc folds fullwidth forms") {
  CHECK(text::nfkc("１２.５％") == "12.5%");
  CHECK(text::nfkc("ＡＢＣ") == "ABC");
}

TEST_CASE("normalize_for_match strips whitespace and punctuation") {
  std::vector<std::string> punct = {"，", "。"};
  CHECK(text::normalize_for_match("12.5 %", punct) == "12.5%");
  CHECK(text::normalize_for_match("你好，世界。", punct) == "你好世界");
  CHECK(text::normalize_for_match("  a\tb\nc ", punct) == "abc");
}

TEST_CASE("parse_number handles units, percents, separators") {
  CHECK(*text::parse_number("42") == 42.0);
  CHECK(*text::parse_number("12.5%") == 12.5);
  CHECK(*text::parse_number("1,234") == 1234.0);
  CHECK(*text::parse_number("7万元") == 7.0);
  CHECK(*text::parse_number("$3.50") == 3.5);
  CHECK(*text::parse_number("-8.25") == -8.25);
  CHECK(*text::parse_number("１２.５") == 12.5);
  CHECK(!text::parse_number("abc"));
  CHECK(!text::parse_number(""));
  CHECK(!text::parse_number("3 and 4"));
}

TEST_CASE("extract_first_number picks the first numeric run") {
  CHECK(*text::extract_first_number("最大值是7万元") == 7.0);
  CHECK(*text::extract_first_number("约 12.5% 左右") == 12.5);
  CHECK(!text::extract_first_number("没有数字"));
}

TEST_CASE("format_double round-trips") {
  for (double v : {0.0, 1.0, 12.5, 1444.8, -3.25, 1.0 / 3.0}) {
    std::string s = text::format_double(v);
    CHECK(std::stod(s) == v);
  }
}

TEST_CASE("sha256 is stable") {
  CHECK(text::sha256_hex("") ==
        "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST_CASE("csv round trip with quoting") {
  CsvTable t;
  t.header = {"category", "value"};
  t.rows = {{"a,b", "1"}, {"with \"quote\"", "2"}, {"line\nbreak", "3"}};
  CsvTable back = parse_csv(to_csv(t));
  CHECK(back == t);
}

TEST_CASE("csv rejects ragged rows") {
  CHECK_THROWS_AS(parse_csv("a,b\n1,2,3\n"), Error);
}

TEST_CASE("rng determinism and fork independence") {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
  Rng c(42);
  c.next_u64();
  CHECK(c.uniform(0.0, 1.0) >= 0.0);
  Rng d(1), e(2);
  CHECK(d.next_u64() != e.next_u64());
}

TEST_CASE("rng uniform stays in range") {
  Rng r(7);
  for (int i = 0; i < 1000; ++i) {
    double v = r.uniform(1.1, 1.3);
    CHECK(v >= 1.1);
    CHECK(v < 1.3);
    auto n = r.uniform_int(3, 9);
    CHECK(n >= 3);
    CHECK(n <= 9);
  }
}
