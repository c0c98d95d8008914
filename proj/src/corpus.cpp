#include "docsynth/corpus.hpp"

#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "docsynth/errors.hpp"
#include "docsynth/text.hpp"

namespace docsynth {

using nlohmann::json;
using nlohmann::ordered_json;

const char* to_string(Category c) {
  switch (c) {
    case Category::doc: return "doc";
    case Category::chart: return "chart";
    case Category::table: return "table";
  }
  return "doc";
}

const char* to_string(Language l) { return l == Language::zh ? "zh" : "en"; }

Category category_from_string(const std::string& s) {
  if (s == "doc") return Category::doc;
  if (s == "chart") return Category::chart;
  if (s == "table") return Category::table;
  throw Error("unknown category: " + s);
}

Language language_from_string(const std::string& s) {
  if (s == "zh") return Language::zh;
  if (s == "en") return Language::en;
  throw Error("unknown language: " + s);
}

std::string make_record_id(const std::string& image_ref,
                           const std::string& first_human_text) {
  return text::sha256_hex(image_ref + "\x1f" + first_human_text).substr(0, 32);
}

std::vector<std::string> validate_record(const QaRecord& r) {
  std::vector<std::string> v;
  if (r.id.empty()) v.push_back("empty id");
  if (r.conversations.empty()) {
    v.push_back("empty conversation");
  } else {
    if (r.conversations.front().role != "human") v.push_back("first role not human");
    if (r.conversations.back().role != "gpt") v.push_back("last role not gpt");
    for (size_t i = 0; i < r.conversations.size(); ++i) {
      const auto& role = r.conversations[i].role;
      if (role != "human" && role != "gpt") {
        v.push_back("unknown role: " + role);
        break;
      }
      if (i > 0 && role == r.conversations[i - 1].role) {
        v.push_back("non-alternating roles");
        break;
      }
    }
  }
  if (!r.provenance.validated && r.provenance.rejection_reason.empty())
    v.push_back("missing rejection reason");
  return v;
}

ordered_json record_to_json(const QaRecord& r) {
  ordered_json turns = ordered_json::array();
  for (const auto& t : r.conversations)
    turns.push_back(ordered_json{{"from", t.role}, {"value", t.text}});
  ordered_json prov{{"generator", r.provenance.generator},
                    {"rng_seed", r.provenance.rng_seed},
                    {"model", r.provenance.model},
                    {"validated", r.provenance.validated}};
  if (!r.provenance.validated)
    prov["rejection_reason"] = r.provenance.rejection_reason;
  ordered_json j{{"id", r.id},
                 {"image", r.image_ref},
                 {"conversations", turns},
                 {"category", to_string(r.category)},
                 {"language", to_string(r.language)}};
  if (!r.task_type.empty()) j["task_type"] = r.task_type;
  j["provenance"] = prov;
  return j;
}

QaRecord record_from_json(const json& j) {
  QaRecord r;
  r.id = j.at("id").get<std::string>();
  r.image_ref = j.at("image").get<std::string>();
  for (const auto& t : j.at("conversations"))
    r.conversations.push_back(
        {t.at("from").get<std::string>(), t.at("value").get<std::string>()});
  r.category = category_from_string(j.at("category").get<std::string>());
  r.language = language_from_string(j.at("language").get<std::string>());
  if (j.contains("task_type")) r.task_type = j["task_type"].get<std::string>();
  const auto& p = j.at("provenance");
  r.provenance.generator = p.at("generator").get<std::string>();
  r.provenance.rng_seed = p.at("rng_seed").get<uint64_t>();
  r.provenance.model = p.at("model").get<std::string>();
  r.provenance.validated = p.at("validated").get<bool>();
  if (p.contains("rejection_reason"))
    r.provenance.rejection_reason = p["rejection_reason"].get<std::string>();
  return r;
}

size_t write_jsonl(const std::vector<QaRecord>& records,
                   const std::filesystem::path& path) {
  std::set<std::string> seen;
  for (const auto& r : records) {
    auto violations = validate_record(r);
    if (!violations.empty())
      throw Error("invalid record " + r.id + ": " + text::join(violations, "; "));
    if (!seen.insert(r.id).second)
      throw Error("duplicate record id: " + r.id);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open for writing: " + path.string());
  for (const auto& r : records) out << record_to_json(r).dump() << "\n";
  out.flush();
  if (!out) throw Error("write failed: " + path.string());
  return records.size();
}

std::vector<QaRecord> read_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open: " + path.string());
  std::vector<QaRecord> records;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (text::trim(line).empty()) continue;
    try {
      records.push_back(record_from_json(json::parse(line)));
    } catch (const json::exception& e) {
      throw Error(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return records;
}

ManifestStats compute_manifest(const std::vector<QaRecord>& records) {
  ManifestStats s;
  s.total = records.size();
  for (const auto& r : records) {
    ++s.by_category[to_string(r.category)];
    ++s.by_language[to_string(r.language)];
  }
  if (s.total > 0) {
    for (const auto& [k, n] : s.by_category)
      s.category_fraction[k] = static_cast<double>(n) / static_cast<double>(s.total);
    for (const auto& [k, n] : s.by_language)
      s.language_fraction[k] = static_cast<double>(n) / static_cast<double>(s.total);
  }
  return s;
}

ordered_json manifest_to_json(const ManifestStats& s) {
  ordered_json cats = ordered_json::object();
  for (const auto& [k, n] : s.by_category)
    cats[k] = ordered_json{{"count", n}, {"fraction", s.category_fraction.at(k)}};
  ordered_json langs = ordered_json::object();
  for (const auto& [k, n] : s.by_language)
    langs[k] = ordered_json{{"count", n}, {"fraction", s.language_fraction.at(k)}};
  return ordered_json{{"total", s.total}, {"categories", cats}, {"languages", langs}};
}

Language detect_language(const std::vector<Turn>& turns) {
  for (const auto& t : turns)
    if (text::contains_cjk(t.text)) return Language::zh;
  return Language::en;
}

}  // namespace docsynth
