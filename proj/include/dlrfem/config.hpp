/*! @file config.hpp
 *  Text configuration format and named experiment presets.
 *
 *  Format: '#' starts a comment, "[section]" opens a section, "key = value"
 *  sets a field. An optional "preset = NAME" before the first section starts
 *  from a preset. Lists are comma separated. emit_config writes every field,
 *  and parse_config(emit_config(c)) == c.
 */
#pragma once

#include <string>
#include <vector>

#include "dlrfem/run_config.hpp"

namespace dlrfem {

//! Throws ConfigError naming `source` and the line number on any problem.
RunConfig parse_config(const std::string& text, const std::string& source = "<config>");
RunConfig load_config(const std::string& path);
std::string emit_config(const RunConfig& config);

std::vector<std::string> preset_names();
//! Throws ConfigError for unknown names.
RunConfig preset(const std::string& name);
std::string preset_description(const std::string& name);

//! Shortest decimal text that parses back to the same double.
std::string format_double(double v);

}  // namespace dlrfem
