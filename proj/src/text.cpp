#include "docsynth/text.hpp"

#include <unicode/normalizer2.h>
#include <unicode/unistr.h>

#include <openssl/evp.h>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstring>
#include <set>

#include "docsynth/errors.hpp"

namespace docsynth::text {

std::string nfkc(const std::string& utf8) {
  UErrorCode ec = U_ZERO_ERROR;
  const icu::Normalizer2* norm = icu::Normalizer2::getNFKCInstance(ec);
  if (U_FAILURE(ec)) throw Error(std::string("ICU NFKC unavailable: ") + u_errorName(ec));
  icu::UnicodeString in = icu::UnicodeString::fromUTF8(utf8);
  icu::UnicodeString out = norm->normalize(in, ec);
  if (U_FAILURE(ec)) throw Error(std::string("NFKC normalization failed: ") + u_errorName(ec));
  std::string result;
  out.toUTF8String(result);
  return result;
}

std::vector<char32_t> decode_utf8(const std::string& s) {
  std::vector<char32_t> cps;
  cps.reserve(s.size());
  size_t i = 0;
  while (i < s.size()) {
    unsigned char b = s[i];
    char32_t cp = 0xFFFD;
    size_t len = 1;
    if (b < 0x80) {
      cp = b;
    } else if ((b >> 5) == 0x6 && i + 1 < s.size()) {
      cp = (b & 0x1F) << 6 | (s[i + 1] & 0x3F);
      len = 2;
    } else if ((b >> 4) == 0xE && i + 2 < s.size()) {
      cp = (b & 0x0F) << 12 | (s[i + 1] & 0x3F) << 6 | (s[i + 2] & 0x3F);
      len = 3;
    } else if ((b >> 3) == 0x1E && i + 3 < s.size()) {
      cp = (b & 0x07) << 18 | (s[i + 1] & 0x3F) << 12 | (s[i + 2] & 0x3F) << 6 |
           (s[i + 3] & 0x3F);
      len = 4;
    }
    cps.push_back(cp);
    i += len;
  }
  return cps;
}

std::string encode_utf8(const std::vector<char32_t>& cps) {
  std::string out;
  for (char32_t cp : cps) {
    if (cp < 0x80) {
      out += static_cast<char>(cp);
    } else if (cp < 0x800) {
      out += static_cast<char>(0xC0 | (cp >> 6));
      out += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp < 0x10000) {
      out += static_cast<char>(0xE0 | (cp >> 12));
      out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
      out += static_cast<char>(0x80 | (cp & 0x3F));
    } else {
      out += static_cast<char>(0xF0 | (cp >> 18));
      out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
      out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
      out += static_cast<char>(0x80 | (cp & 0x3F));
    }
  }
  return out;
}

size_t codepoint_count(const std::string& utf8) { return decode_utf8(utf8).size(); }

bool is_cjk(char32_t cp) {
  return (cp >= 0x4E00 && cp <= 0x9FFF) ||    // unified ideographs
         (cp >= 0x3400 && cp <= 0x4DBF) ||    // extension A
         (cp >= 0xF900 && cp <= 0xFAFF) ||    // compatibility ideographs
         (cp >= 0x3000 && cp <= 0x303F) ||    // CJK punctuation
         (cp >= 0xFF00 && cp <= 0xFFEF);      // fullwidth forms
}

bool contains_cjk(const std::string& utf8) {
  for (char32_t cp : decode_utf8(utf8))
    if (is_cjk(cp)) return true;
  return false;
}

static bool is_space_cp(char32_t cp) {
  return cp == ' ' || cp == '\t' || cp == '\n' || cp == '\r' || cp == '\f' ||
         cp == '\v' || cp == 0x00A0 || cp == 0x3000;
}

std::string normalize_for_match(const std::string& utf8,
                                const std::vector<std::string>& punctuation) {
  // the drop set lives in NFKC space too, so fullwidth punctuation entries
  // still match once the input has been folded
  std::set<char32_t> drop;
  for (const auto& p : punctuation)
    for (char32_t cp : decode_utf8(nfkc(p))) drop.insert(cp);
  std::vector<char32_t> kept;
  for (char32_t cp : decode_utf8(nfkc(utf8))) {
    if (is_space_cp(cp)) continue;
    if (drop.count(cp)) continue;
    kept.push_back(cp);
  }
  return encode_utf8(kept);
}

std::optional<double> parse_number(const std::string& token) {
  std::string s = trim(nfkc(token));
  if (s.empty()) return std::nullopt;
  // currency prefixes
  for (const char* cur : {"$", "€", "£", "¥", "￥"}) {
    if (starts_with(s, cur)) {
      s = trim(s.substr(std::strlen(cur)));
      break;
    }
  }
  // grouping commas: only between digits, followed by exactly 3 digits
  std::string compact;
  for (size_t i = 0; i < s.size(); ++i) {
    if (s[i] == ',' && i > 0 && std::isdigit(static_cast<unsigned char>(s[i - 1]))) {
      size_t digits = 0;
      while (i + 1 + digits < s.size() &&
             std::isdigit(static_cast<unsigned char>(s[i + 1 + digits])))
        ++digits;
      if (digits == 3 || (digits > 3 && digits % 3 == 0)) continue;
    }
    compact += s[i];
  }
  const char* begin = compact.c_str();
  char* end = nullptr;
  errno = 0;
  double v = std::strtod(begin, &end);
  if (end == begin || errno == ERANGE) return std::nullopt;
  std::string rest = trim(std::string(end));
  if (rest.empty()) return v;
  if (rest[0] == '%') rest = trim(rest.substr(1));
  if (rest.empty()) return v;
  // a short unit word (letters or CJK, no further digits) is tolerated
  auto cps = decode_utf8(rest);
  if (cps.size() > 6) return std::nullopt;
  for (char32_t cp : cps) {
    bool alpha = (cp < 0x80 && std::isalpha(static_cast<int>(cp))) || is_cjk(cp) ||
                 cp == 0x00B0 || cp == '/';
    if (!alpha) return std::nullopt;
  }
  return v;
}

std::optional<double> extract_first_number(const std::string& utf8) {
  std::string s = nfkc(utf8);
  for (size_t i = 0; i < s.size(); ++i) {
    char c = s[i];
    bool starts = std::isdigit(static_cast<unsigned char>(c)) ||
                  ((c == '-' || c == '+' || c == '.') && i + 1 < s.size() &&
                   std::isdigit(static_cast<unsigned char>(s[i + 1])));
    if (!starts) continue;
    size_t j = i;
    if (s[j] == '-' || s[j] == '+') ++j;
    while (j < s.size() && (std::isdigit(static_cast<unsigned char>(s[j])) ||
                            s[j] == '.' || s[j] == ','))
      ++j;
    auto v = parse_number(s.substr(i, j - i));
    if (v) return v;
    i = j;
  }
  return std::nullopt;
}

bool approx_equal(double a, double b, double rel_tol) {
  double scale = std::max({1.0, std::fabs(a), std::fabs(b)});
  return std::fabs(a - b) <= rel_tol * scale;
}

std::string format_double(double v) {
  if (v == 0.0) v = 0.0;  // normalize -0
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw Error("format_double: to_chars failed");
  return std::string(buf, ptr);
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr))
    throw Error("sha256 failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xF];
  }
  return out;
}

std::string to_lower_ascii(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n\f\v");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n\f\v");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  size_t start = 0;
  for (size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      out.push_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

bool starts_with(const std::string& s, const std::string& prefix) {
  return s.size() >= prefix.size() && s.compare(0, prefix.size(), prefix) == 0;
}

}  // namespace docsynth::text
