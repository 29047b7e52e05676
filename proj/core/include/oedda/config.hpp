/**
 * @file config.hpp
 * @brief Plain-text key-value configuration for experiments.
 *
 * One `key = value` pair per line; `#` starts a comment; blank lines are
 * ignored. Lists are comma separated. Unknown keys are rejected. Example:
 *
 *   mode = adaptive-inflation
 *   penalty = 0.0035
 *   optimizer.ftol = 1e-6
 *   trajectory_indices = 8, 32
 */
#pragma once

#include <istream>
#include <map>
#include <string>
#include <vector>

#include "oedda/experiment.hpp"

namespace oedda {

using KeyValues = std::vector<std::pair<std::string, std::string>>;

/// Splits config text into (key, value) pairs in file order. Throws ConfigError
/// on a line without '=' or with an empty key.
KeyValues parse_key_values(std::istream& in);

/// Applies pairs to `cfg`; later keys override earlier ones. Throws ConfigError
/// for unknown keys or malformed values. Does not call cfg.validate().
void apply_key_values(ExperimentConfig& cfg, const KeyValues& kv);

/// Every configurable field, in a stable order; doubles use 17 significant digits.
KeyValues to_key_values(const ExperimentConfig& cfg);

ExperimentConfig load_config(const std::string& path, const ExperimentConfig& base = {});
std::string format_config(const ExperimentConfig& cfg);
void save_config(const std::string& path, const ExperimentConfig& cfg);

/// Names accepted by apply_key_values.
std::vector<std::string> config_keys();

double parse_double(const std::string& text, const std::string& key);
long long parse_integer(const std::string& text, const std::string& key);
bool parse_bool(const std::string& text, const std::string& key);
std::string format_double(double v);

}  // namespace oedda
