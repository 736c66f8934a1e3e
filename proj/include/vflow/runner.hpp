#pragma once

#include <string>

namespace vflow {

struct RunOptions {
    std::string config_path;
    std::string out_dir = ".";
    int threads = 1;
};

/** Execute one subcommand ("simulate", "section", "equilibria",
 *  "greens-table", "annulus", "verify").  Returns the process exit code:
 *  0 on success, 2 for configuration errors, 3 for numerical failures.
 *  Errors are reported as one JSON object on stderr. */
int dispatch(const std::string& command, const RunOptions& opt);

/** The self-check battery behind the verify subcommand (also used by tests);
 *  prints one line per check and returns the number of failures.  The offset
 *  shifts the Robin reporting constant and exists purely so the test suite
 *  can prove a wrong value actually fails. */
int run_verify_checks(double robin_constant_offset = 0.0);

} // namespace vflow
