#pragma once

#include <iosfwd>

namespace poolforge::cli {

// Entry point for the poolforge binary; returns the process exit code.
int run(int argc, const char *const *argv, std::ostream &out,
        std::ostream &err);

}  // namespace poolforge::cli
