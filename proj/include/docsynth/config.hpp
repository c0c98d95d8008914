#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "docsynth/augment.hpp"
#include "docsynth/chart.hpp"
#include "docsynth/docqa.hpp"
#include "docsynth/gateway.hpp"
#include "docsynth/preprocess.hpp"

namespace docsynth {

struct ChartPipelineConfig {
  std::vector<std::string> topic_pool = {"Art & Design", "Science & Nature"};
  TaskMatrix task_matrix = TaskMatrix::defaults();
  int count = 10;  // mutations per seed
};

struct MixConfig {
  double default_synthetic_fraction = 0.12;
};

struct RunConfig {
  int workers = 1;
};

struct PipelineConfig {
  GatewayConfig gateway;
  DocQaConfig docqa;
  ChartPipelineConfig chart;
  ResizePolicy preprocess;
  MixConfig mix;
  AugmentPolicy augment;
  RunConfig run;
  std::string config_hash;  // sha256 of the raw file bytes
};

// Strict INI:  [section] headers, key = value lines, # or ; comments.
// Unknown sections or keys raise ConfigError with the dotted key path.
PipelineConfig parse_config(const std::string& ini_text);
PipelineConfig load_config(const std::filesystem::path& path);

std::string default_config_ini();

}  // namespace docsynth
