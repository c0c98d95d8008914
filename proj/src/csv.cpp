#include "docsynth/csv.hpp"

#include "docsynth/errors.hpp"
#include "docsynth/text.hpp"

namespace docsynth {

namespace {

std::vector<std::vector<std::string>> parse_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  size_t i = 0;
  auto end_field = [&] {
    row.push_back(field);
    field.clear();
    field_started = false;
  };
  auto end_row = [&] {
    end_field();
    rows.push_back(row);
    row.clear();
  };
  while (i < text.size()) {
    char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"' && !field_started) {
      in_quotes = true;
      field_started = true;
    } else if (c == ',') {
      end_field();
    } else if (c == '\n') {
      if (!field.empty() || !row.empty() || field_started) end_row();
    } else if (c == '\r') {
      // swallowed; \r\n handled by the \n branch
    } else {
      field += c;
      field_started = true;
    }
    ++i;
  }
  if (in_quotes) throw Error("csv: unterminated quoted field");
  if (!field.empty() || !row.empty() || field_started) end_row();
  return rows;
}

}  // namespace

CsvTable parse_csv(const std::string& raw) {
  auto rows = parse_rows(raw);
  if (rows.empty()) throw Error("csv: no header row");
  CsvTable t;
  t.header = rows[0];
  for (size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() != t.header.size())
      throw Error("csv: row " + std::to_string(r) + " has " +
                  std::to_string(rows[r].size()) + " fields, header has " +
                  std::to_string(t.header.size()));
    t.rows.push_back(rows[r]);
  }
  return t;
}

static void write_field(std::string& out, const std::string& f) {
  bool quote = f.find_first_of(",\"\n\r") != std::string::npos;
  if (!quote) {
    out += f;
    return;
  }
  out += '"';
  for (char c : f) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
}

std::string to_csv(const CsvTable& table) {
  std::string out;
  for (size_t c = 0; c < table.header.size(); ++c) {
    if (c) out += ',';
    write_field(out, table.header[c]);
  }
  out += '\n';
  for (const auto& row : table.rows) {
    for (size_t c = 0; c < row.size(); ++c) {
      if (c) out += ',';
      write_field(out, row[c]);
    }
    out += '\n';
  }
  return out;
}

}  // namespace docsynth
