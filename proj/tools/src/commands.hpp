#pragma once

#include <set>
#include <string>
#include <vector>

#include "config.hpp"

namespace malthus::cli {

const std::vector<std::string>& command_names();
/// Config keys accepted by a command.
const std::set<std::string>& allowed_keys(const std::string& command);

/// The given config completed with the command's defaults; throws
/// ConfigError on unknown keys.
Config resolve(const std::string& command, const Config& given);

/// Runs a command on a fully resolved config and returns its CSV output.
/// Configuration problems throw ConfigError (or InputError) before any
/// simulation starts.
std::string run_command(const std::string& command, const Config& config, unsigned threads);

/// Seed recorded in the manifest (0 for the deterministic age commands).
std::uint64_t config_seed(const Config& config);

}  // namespace malthus::cli
