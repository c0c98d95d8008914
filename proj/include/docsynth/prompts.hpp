#pragma once

#include <map>
#include <string>

namespace docsynth::prompts {

// Generation templates. Placeholders are written {name} and substituted
// in a single pass; every placeholder must receive a non-empty value.

// Text-rich document QA. Placeholders: {json_string}, {template}.
extern const std::string kDocQa;

// Chart image diversification (area chart). Placeholders: {code},
// {topics_pool}.
extern const std::string kChartImage;

// Chart QA. Placeholders: {chart_type} (twice), {code}, {table_data},
// {task_types}, {template}.
extern const std::string kChartQa;

// Table QA with the 11 task-type definitions. Placeholders: {html_code},
// {template}.
extern const std::string kTableQa;

std::string substitute(const std::string& tpl,
                       const std::map<std::string, std::string>& values);

}  // namespace docsynth::prompts
