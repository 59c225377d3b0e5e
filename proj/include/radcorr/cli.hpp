#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace radcorr {

/// Entry point of the `radcorr` tool. Precedence: built-in defaults, then the
/// --config file, then command-line flags. CSV goes to --out ("-" is `out`).
/// Errors print one line `<module>: <kind>: <message>` on `err` and return
/// the matching exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv);

}  // namespace radcorr
