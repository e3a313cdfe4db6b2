#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace smbtree {

enum ExitCode { kOk = 0, kUnknown = 1, kInputError = 2, kAuditFail = 3 };

/// Runs one invocation. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace smbtree
