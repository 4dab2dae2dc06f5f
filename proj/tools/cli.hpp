#pragma once

#include <iosfwd>

namespace parlalign::cli {

// Entry point of the `parlalign` tool. Returns the process exit status:
// 0 ok, 2 validation, 3 missing input, 4 internal.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace parlalign::cli
