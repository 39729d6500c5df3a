#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include "hybridgrid/experiment.hpp"

namespace hybridgrid {

/// Configuration problem with the source location it was found at.
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& source, int line, const std::string& field,
                const std::string& message);

    int line() const { return line_; }  // 1-based; 0 when unknown
    const std::string& field() const { return field_; }

private:
    int line_;
    std::string field_;
};

/// Parses a YAML sweep configuration. Unknown keys, wrong types and
/// out-of-range values raise ConfigError. Missing keys keep the defaults of
/// ExperimentConfig.
ExperimentConfig parse_config(const std::string& text, const std::string& source = "<config>");

ExperimentConfig load_config(const std::filesystem::path& path);

/// YAML rendering of the effective configuration; parse_config reads it back.
std::string dump_config(const ExperimentConfig& config);

}  // namespace hybridgrid
