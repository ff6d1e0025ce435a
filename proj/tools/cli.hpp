#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace phasespace::cli {

constexpr int schema_version = 1;

/// Runs one subcommand; args excludes the program name. The report goes to
/// `out` (or to --out / $PHASESPACE_REPORT_DIR), diagnostics to `err`.
/// Returns 0 when every check passed, 1 when a verification failed, 2 on
/// usage or input errors.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace phasespace::cli
