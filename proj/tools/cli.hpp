#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace parmine::cli {

enum ExitCode : int { kOk = 0, kInputError = 1, kUsageError = 2 };

/// Runs one `parmine` invocation. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace parmine::cli
