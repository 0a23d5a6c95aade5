#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace bshape {

/// Exit codes of the command-line driver.
enum ExitCode : int {
    exit_ok = 0,
    exit_invalid = 1,        ///< bad flag, config key, file or I/O failure
    exit_nonconvergence = 2, ///< Picard or linear solver failure
    exit_gradcheck = 3,      ///< gradient check above tolerance
    exit_geometry = 4,       ///< curve or mesh degenerated
};

/// Output directory: explicit value if non-empty, else $SHAPEOPT_OUT_DIR,
/// else "shapeopt_out".
std::filesystem::path resolve_out_dir(const std::string& explicit_dir);

/// Runs one subcommand (run, case, gradcheck, solve-once, export-fields).
/// `args` excludes the program name.
int cli_run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace bshape
