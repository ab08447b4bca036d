#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "specmix/io.hpp"

namespace specmix {

struct RunConfig {
    std::string command;
    Json params;  // command-specific block, defaults filled by parse_config
    std::string out_dir = "out";
    double eps = 1e-9;
    unsigned jobs = 1;
    std::uint64_t seed = 0;
    unsigned max_levels = 0;  // truncation-depth cap (SPECMIX_MAX_LEVELS), 0 = none
};

// Flat config object: common keys (command, out, eps, jobs, seed) plus the
// command's own parameters. Unknown keys are rejected. command_override, when
// nonempty, must agree with any "command" key in the JSON.
RunConfig parse_config(const Json& config, const std::string& command_override = std::string());
RunConfig load_config(const std::string& path, const std::string& command_override = std::string());

// Executes the configured command, writing artifacts under out_dir.
// Returns 0 on success, 2 when a certified claim fails to hold, 1 on
// operational errors. Failures leave a one-line JSON error record on err.
int run(const RunConfig& config, std::ostream& err);

void emit_plotdata(const CorrelationTable& table, const std::string& path);

}  // namespace specmix
