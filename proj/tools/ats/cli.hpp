#pragma once

#include <iosfwd>
#include <span>
#include <string>

#include "config.hpp"

namespace ats::cli {

/// Runs one command line (without the program name). Returns the exit status:
/// 0 on success, 1 on a runtime failure, 2 on usage or configuration errors.
int run(std::span<const std::string> args, std::ostream& out, std::ostream& err, const Env& env = process_env());

}  // namespace ats::cli
