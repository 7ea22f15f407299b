#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ctmlab::cli {

/// Runs `ctm-lab` with `args` (excluding the program name). Returns the
/// process exit code: 0 success, 1 validation error, 2 I/O error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ctmlab::cli
