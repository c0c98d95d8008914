#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace docsynth {

enum class Category { doc, chart, table };
enum class Language { zh, en };

const char* to_string(Category c);
const char* to_string(Language l);
Category category_from_string(const std::string& s);
Language language_from_string(const std::string& s);

struct Turn {
  std::string role;  // "human" or "gpt"
  std::string text;
  bool operator==(const Turn&) const = default;
};

struct Provenance {
  std::string generator;
  uint64_t rng_seed = 0;
  std::string model;
  bool validated = true;
  std::string rejection_reason;  // required non-empty when validated=false
  bool operator==(const Provenance&) const = default;
};

// One image-grounded conversation sample.
struct QaRecord {
  std::string id;
  std::string image_ref;
  std::vector<Turn> conversations;
  Category category = Category::doc;
  Language language = Language::zh;
  std::string task_type;  // optional tag; doc records carry the region kind
  Provenance provenance;
  bool operator==(const QaRecord&) const = default;
};

// Content-hash id so regeneration is idempotent.
std::string make_record_id(const std::string& image_ref,
                           const std::string& first_human_text);

// Every violated invariant, empty when the record is well formed.
std::vector<std::string> validate_record(const QaRecord& record);

nlohmann::ordered_json record_to_json(const QaRecord& record);
QaRecord record_from_json(const nlohmann::json& j);

// One record per line, UTF-8, stable field order. All records must pass
// validate_record and carry unique ids; the first offender aborts the
// write, naming its id. Returns the number of lines written.
size_t write_jsonl(const std::vector<QaRecord>& records,
                   const std::filesystem::path& path);
std::vector<QaRecord> read_jsonl(const std::filesystem::path& path);

struct ManifestStats {
  std::map<std::string, size_t> by_category;
  std::map<std::string, size_t> by_language;
  size_t total = 0;
  std::map<std::string, double> category_fraction;
  std::map<std::string, double> language_fraction;
};

ManifestStats compute_manifest(const std::vector<QaRecord>& records);
nlohmann::ordered_json manifest_to_json(const ManifestStats& stats);

// Heuristic language tag: any CJK codepoint in the conversation marks zh.
Language detect_language(const std::vector<Turn>& turns);

}  // namespace docsynth
