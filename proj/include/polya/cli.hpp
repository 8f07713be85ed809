// SPDX-License-Identifier: Apache-2.0
//
// Batch front-end. An experiment is one JSON document (see README) whose
// fields may be overridden from the command line; results go to a file or
// stdout behind a provenance header.
#pragma once

#include "polya/serialization.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace polya::cli {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int { kSuccess = 0, kCheckFailed = 1, kUsageError = 2 };

enum class OutputFormat { json, csv };

struct ExperimentConfig {
    std::string command;
    std::vector<std::string> checks;
    /// Window and parameter block, as read from the config file.
    json params = json::object();
    std::optional<std::uint64_t> seed;
    std::size_t n = 10000;
    double eps = 1e-6;
    std::string out_path;
    OutputFormat format = OutputFormat::json;
};

/// Command-line overrides; unset fields leave the config document alone.
struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> n;
    std::optional<double> eps;
    std::optional<std::string> out_path;
    std::optional<std::string> format;
};

/// Raised for configuration problems; names the offending field.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Builds and validates a config. `document` may be null (flags only).
ExperimentConfig make_config(const std::string& command, std::vector<std::string> checks, const json& document,
                             const Overrides& overrides);

/// Executes the experiment. Result artifacts go to config.out_path (stdout
/// when empty or "-"); human-readable summaries and errors go to `log`.
int run(const ExperimentConfig& config, std::ostream& stdout_stream, std::ostream& log);

/// Full command-line entry point.
int main(int argc, char** argv);

} // namespace polya::cli
