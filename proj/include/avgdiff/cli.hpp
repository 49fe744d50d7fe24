#pragma once

namespace avgdiff {

/// Full command-line front end; tools/main.cpp is a thin wrapper around this
/// so the dispatcher stays testable in-process.
int cli_main(int argc, const char* const* argv);

}  // namespace avgdiff
