#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "docsynth/gateway.hpp"

namespace docsynth {

struct PipelineCounts {
  size_t generated = 0;
  size_t validated = 0;
  std::map<std::string, size_t> rejected_by_reason;
  size_t under_filled_batches = 0;

  size_t rejected_total() const;
};

// Machine-readable run summary; generated == validated + rejected holds
// per pipeline by construction and is re-checked on serialization.
struct RunReport {
  std::map<std::string, PipelineCounts> pipelines;
  TokenUsage token_usage;
  double wall_ms = 0;
  std::vector<std::string> output_paths;
  std::string config_hash;
};

nlohmann::ordered_json report_to_json(const RunReport& report);
void write_report(const RunReport& report, const std::filesystem::path& path);

}  // namespace docsynth
