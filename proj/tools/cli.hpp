#pragma once

namespace coe::cli {

// Entry point behind the coe binary. Exit codes: 0 success, 1 validation
// error (message names the offending key), 2 computation failure.
int run(int argc, const char* const* argv);

} // namespace coe::cli
