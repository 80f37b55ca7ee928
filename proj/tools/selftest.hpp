#pragma once

#include <iosfwd>

namespace ssmsim {

/// Quick cross-module property checks. Prints one PASS/FAIL line per check
/// and returns true when all pass.
bool run_selftest(std::ostream& out);

}  // namespace ssmsim
