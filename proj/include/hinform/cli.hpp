#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hinform {

/// Command-line entry point (verbs: reduce, synth, identify, bench, check).
/// `in` backs inputs given as "-". Returns the process exit code:
/// 0 success, 1 input error, 2 unstable system, 3 uncontrollable system.
int run_cli(std::vector<std::string> args, std::istream& in, std::ostream& out,
            std::ostream& err);

}  // namespace hinform
