#pragma once

#include <iosfwd>

namespace randdiv::cli {

/// Exit codes of the randdiv tool.
enum ExitCode : int {
    ok = 0,
    validation_failure = 1,
    parse_failure = 2,
    solver_failure = 3,
    empty_contributing_set = 4,
    precondition_violation = 5,
};

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace randdiv::cli
