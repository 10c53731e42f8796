#pragma once

namespace compo {

// Full command-line dispatch; returns the process exit status.
// Exit codes: 0 success, 1 validation/usage error, 2 runtime failure.
int cli_main(int argc, const char* const* argv);

}  // namespace compo
