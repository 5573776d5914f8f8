#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace dynlogit::cli {

enum ExitCode : int {
    kOk = 0,
    kUsage = 1,
    kParse = 2,
    kValidation = 3,
    kConvergence = 4,
    kIo = 5,
    kSeparation = 6,
};

/// Runs one command line (without the program name). Reports go to files under
/// the output directory; summaries to `out`; structured errors to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dynlogit::cli
