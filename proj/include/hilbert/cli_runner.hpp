#pragma once

#include <string>
#include <vector>

namespace hilbert {

/// Batch driver entry point; argv-style arguments without the program name.
/// Exit codes: 0 success, 1 invariant violations, 2 schema/usage errors.
int run_cli(const std::vector<std::string>& args);

}  // namespace hilbert
