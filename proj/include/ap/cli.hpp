#pragma once

namespace ap::cli {

// Full command-line driver. Exit codes: 0 success, 1 usage error, 2 data
// error. AP_LOG=off silences the per-run log line on stderr.
int run(int argc, const char* const* argv);

}  // namespace ap::cli
