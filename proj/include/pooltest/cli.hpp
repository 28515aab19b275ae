#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pooltest {

// Entry point behind the pooltest binary; args is argv[1..] in order.
// Returns the process exit status: 0 exactly when no error artifact was
// produced.  All artifacts and error messages go to the given streams.
int run_cli(std::vector<std::string> args, std::ostream& out,
            std::ostream& err);

}  // namespace pooltest
