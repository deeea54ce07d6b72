#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pebblemark::cli {

/// Dispatch one command line (without argv[0]). Returns 0 on success, 1 on a
/// contract error, 2 on a usage error. Reports go to `out`, diagnostics to
/// `err`. `repro` re-enters this function with remapped output paths.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pebblemark::cli
