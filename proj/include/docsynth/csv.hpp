#pragma once

#include <string>
#include <vector>

namespace docsynth {

// Rectangular CSV with a mandatory header row.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  size_t n_cols() const { return header.size(); }
  size_t n_rows() const { return rows.size(); }
  bool operator==(const CsvTable&) const = default;
};

// Strict parse: quoted fields, embedded commas/newlines/doubled quotes,
// every row must match the header width.
CsvTable parse_csv(const std::string& text);

// Canonical serialization: fields quoted only when needed, "\n" line ends,
// no trailing newline ambiguity (ends with a single "\n").
std::string to_csv(const CsvTable& table);

}  // namespace docsynth
