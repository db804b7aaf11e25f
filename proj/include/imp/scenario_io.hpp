#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include "imp/world.hpp"

namespace imp {

/// Raised for unreadable or malformed scenario documents. The message names
/// the line (for syntax errors) or the offending field.
class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Rounds to 9 significant digits; every number written by the artifact goes
/// through this so output files are byte-reproducible.
double round9(double v);

/// Formats with 9 significant digits ("%.9g").
std::string fmt9(double v);

std::string scenario_to_json(const WorldState& world);
WorldState scenario_from_json(const std::string& text);

void write_scenario(const std::filesystem::path& path, const WorldState& world);
WorldState read_scenario(const std::filesystem::path& path);

}  // namespace imp
