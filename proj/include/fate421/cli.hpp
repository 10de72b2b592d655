#pragma once

#include <iosfwd>

namespace fate421 {

/// fate421 {solve, eval, tables, bench, mc, advise, serve} [options].
/// Returns the exit status: 0 on success, 1 on a failed computation or
/// verification, 2 on a usage error.
int run_cli(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace fate421
