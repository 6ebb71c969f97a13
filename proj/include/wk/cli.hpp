#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace wk {

// Parses and dispatches one command-line invocation (arguments only, no
// program name).  Output goes to `out`, diagnostics to `err`.  Returns the
// process exit status:
//
//   0  success (including a verified certificate and a clean sampling run)
//   1  a negative mathematical finding (refuted certificate, counterexample)
//   2  usage errors, evaluation errors, inconclusive verdicts
//
// Identical invocations (including --seed) produce byte-identical output.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace wk
