#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace bferl {

/// Entry point of the `bferl` tool. `args` excludes the program name.
/// Returns 0 on success, 1 on usage or config errors, 2 on internal failure.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bferl
