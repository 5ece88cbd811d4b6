#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace dnnmodel::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 1;
inline constexpr int kExitUsageError = 2;

/// Runs one command line (without the program name). Reports go to out, diagnostics to err.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dnnmodel::cli
