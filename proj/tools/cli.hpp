#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace gradientlab::cli {

enum ExitCode : int {
  exit_ok = 0,
  exit_file_errors = 1,  // corpus: some files could not be processed
  exit_violated = 2,
  exit_indeterminate = 3,
  exit_usage = 64,
};

// Runs one command; `args` excludes the program name. Reports go to `out`
// (or the --out file), diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace gradientlab::cli
