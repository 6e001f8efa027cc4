#pragma once

#include <ostream>

namespace gausscorr::cli {

/// Exit codes: 0 success, 2 invalid input, 3 numerical failure. Errors are
/// written to `err` as a single JSON object.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace gausscorr::cli
