#pragma once

namespace nfpe {

// Entry point of the command-line driver. Exit codes: 0 success, 1 for
// configuration or validation problems (message names the offending field),
// 2 for numerical failures during an otherwise valid run.
int run_cli(int argc, const char* const* argv);

} // namespace nfpe
