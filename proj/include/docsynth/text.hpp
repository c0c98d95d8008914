#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace docsynth::text {

// Unicode NFKC normalization (folds fullwidth forms, compatibility
// characters, ideographic spaces).
std::string nfkc(const std::string& utf8);

// Decodes UTF-8 into codepoints. Invalid bytes become U+FFFD.
std::vector<char32_t> decode_utf8(const std::string& utf8);
std::string encode_utf8(const std::vector<char32_t>& cps);
size_t codepoint_count(const std::string& utf8);

bool is_cjk(char32_t cp);
bool contains_cjk(const std::string& utf8);

// NFKC, then drop all whitespace, then drop every codepoint listed in
// `punctuation` (each entry one UTF-8 encoded codepoint or short string).
std::string normalize_for_match(const std::string& utf8,
                                const std::vector<std::string>& punctuation);

// Lenient numeric reader used for chart tables, grid columns and answers:
// trims whitespace, strips currency prefixes, grouping commas between
// digits, a trailing percent sign and a short trailing unit word.
// "10%" parses as 10 (no rescaling). Returns nullopt on anything else.
std::optional<double> parse_number(const std::string& token);

// First parseable number inside free-form text, after NFKC folding.
std::optional<double> extract_first_number(const std::string& utf8);

bool approx_equal(double a, double b, double rel_tol = 1e-6);

// Shortest round-trip decimal form ("7", "12.5", "1444.8").
std::string format_double(double v);

std::string sha256_hex(const std::string& bytes);

std::string to_lower_ascii(std::string s);
std::string trim(const std::string& s);
std::vector<std::string> split(const std::string& s, char sep);
std::string join(const std::vector<std::string>& parts, const std::string& sep);
bool starts_with(const std::string& s, const std::string& prefix);

}  // namespace docsynth::text
