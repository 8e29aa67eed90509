#pragma once

// Figure-data commands behind the CLI. Each returns the machine-readable
// payload and a short human summary; nothing here touches stdout or stderr.

#include "bandedge/config.hpp"

#include <string>
#include <vector>

namespace bandedge {

enum class OutputFormat { csv, json };

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int config = 2;
inline constexpr int numeric = 3;
inline constexpr int fit = 4;
} // namespace exit_code

struct CommandOutput {
    std::string data;
    std::string summary;
    int exit_code = exit_code::ok;
};

/// 17 significant digits, '.' decimal point regardless of locale.
std::string format_double(double x);

/// Comma-separated rows with LF endings.
std::string csv_table(const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& rows);

CommandOutput cmd_bound_state(const RunConfig& config, OutputFormat format);
CommandOutput cmd_interactions(const RunConfig& config, OutputFormat format);
CommandOutput cmd_design_powerlaw(const RunConfig& config, OutputFormat format);
CommandOutput cmd_exchange(const RunConfig& config, OutputFormat format);
CommandOutput cmd_evolve(const RunConfig& config, OutputFormat format);
/// `workers` threads per Monte-Carlo point (0: hardware concurrency); the output
/// does not depend on it.
CommandOutput cmd_disorder(const RunConfig& config, OutputFormat format, unsigned workers = 0);
CommandOutput cmd_preset_list();

} // namespace bandedge
