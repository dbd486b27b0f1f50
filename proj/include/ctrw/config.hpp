#pragma once

#include <map>
#include <optional>
#include <string>

#include "ctrw/harness.hpp"

namespace ctrw {

// Parsed experiment file plus front-end settings.
struct CliConfig {
    ExperimentConfig experiment;
    std::optional<std::string> json_path;
    std::optional<std::string> csv_path;
    int verbosity = 0;
};

// Raw `section.key -> value` pairs. Accepts `[section]` headers followed by
// `key = value` lines, or fully qualified `section.key = value` lines.
// `#` and `;` start comments.
std::map<std::string, std::string> parse_key_values(const std::string& text);

// Builds and validates a CliConfig. Unknown keys and out-of-range values
// raise ConfigError. CTRW_SEED, when set, overrides experiment.master_seed.
CliConfig build_config(const std::map<std::string, std::string>& kv);

// Reads `path`; a missing file is a ConfigError.
CliConfig load_cli_config(const std::string& path);

}  // namespace ctrw
