#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hlwc {

// Entry point behind the `hlwc` executable. Returns the process exit code;
// errors are reported on `err`, never thrown.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hlwc
