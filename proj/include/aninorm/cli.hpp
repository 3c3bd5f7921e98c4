#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace aninorm {

/// Runs one CLI subcommand (norm, h2, hinf, anisotropy, feasible, verify,
/// bench, summarize). `args` excludes the program name. Results go to `out`
/// as one JSON object (summarize prints CSV); diagnostics go to `err`.
/// Returns 0 on success, 1 on computation or input-file failure, 2 on usage
/// error.
int cli_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace aninorm
