#pragma once

// Command-line front end.  Exit codes: 0 success, 1 validation/usage error,
// 2 verification found a defect above tolerance.

namespace copmark {

int run_cli(int argc, const char* const* argv);

}  // namespace copmark
