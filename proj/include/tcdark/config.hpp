#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "tcdark/experiments.hpp"

namespace tcdark {

using ConfigEntries = std::vector<std::pair<std::string, std::string>>;

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Flat "key = value" lines; '#' starts a comment. Throws ConfigError with the
/// line number on malformed input.
ConfigEntries parse_config(std::istream& is);
ConfigEntries read_config_file(const std::string& path);
/// "key=value" as given to --set.
std::pair<std::string, std::string> parse_assignment(const std::string& text);

/// Known keys in canonical order.
const std::vector<std::string>& config_keys();

/// Type-checked update of one field; throws ConfigError for unknown keys or bad values.
void apply_setting(ExperimentSpec& spec, const std::string& key, const std::string& value);
/// Applies entries in order. A leading "experiment" entry, if present, selects the base spec.
ExperimentSpec spec_from_entries(const ConfigEntries& entries, ExperimentSpec base);

/// All keys with their current values; round-trips through spec_from_entries.
ConfigEntries spec_entries(const ExperimentSpec& spec);
void write_config(std::ostream& os, const ExperimentSpec& spec);

}  // namespace tcdark
