#include "docsynth/report.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "docsynth/errors.hpp"

namespace docsynth {

using nlohmann::ordered_json;

size_t PipelineCounts::rejected_total() const {
  size_t n = 0;
  for (const auto& [_, c] : rejected_by_reason) n += c;
  return n;
}

ordered_json report_to_json(const RunReport& report) {
  ordered_json pipelines = ordered_json::object();
  for (const auto& [name, counts] : report.pipelines) {
    if (counts.generated != counts.validated + counts.rejected_total())
      throw Error("report imbalance in pipeline " + name);
    ordered_json rejected = ordered_json::object();
    for (const auto& [reason, n] : counts.rejected_by_reason) rejected[reason] = n;
    pipelines[name] = ordered_json{{"generated", counts.generated},
                                   {"validated", counts.validated},
                                   {"rejected", rejected},
                                   {"under_filled_batches", counts.under_filled_batches}};
  }
  return ordered_json{
      {"pipelines", pipelines},
      {"token_usage",
       ordered_json{{"prompt_tokens", report.token_usage.prompt_tokens},
                    {"completion_tokens", report.token_usage.completion_tokens}}},
      {"wall_ms", report.wall_ms},
      {"outputs", report.output_paths},
      {"config_hash", report.config_hash}};
}

void write_report(const RunReport& report, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write report: " + path.string());
  out << report_to_json(report).dump(2) << "\n";
}

}  // namespace docsynth
