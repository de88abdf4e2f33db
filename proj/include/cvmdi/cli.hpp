#pragma once

// Command line front end. run() is the whole program; the binary's main()
// only forwards argv and the standard streams, so tests can drive every
// subcommand in process and capture exact bytes.
//
// Exit codes: 0 success, 1 usage error, 2 domain or physicality error,
// 3 no key / no root in a demanded search.

#include <iosfwd>
#include <string>
#include <vector>

namespace cvmdi::cli {

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

} // namespace cvmdi::cli
