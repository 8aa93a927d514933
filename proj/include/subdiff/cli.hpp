#pragma once

// Command-line front end. Subcommands: ml, calpha, figures, forward, invert,
// experiment. Exit codes: 0 success, 1 usage/domain/config error, 2 numerical
// failure.

#include <iosfwd>
#include <string>
#include <vector>

namespace subdiff {

/// Environment variable consulted for the output directory when --out is absent.
inline constexpr const char* kOutputDirEnv = "SUBDIFF_OUT_DIR";

/// `args` excludes the program name.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int dispatch(int argc, char** argv);

}  // namespace subdiff
