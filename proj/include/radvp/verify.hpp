#pragma once

#include <iosfwd>

namespace radvp {

// Quick property checks across all modules, no full simulation.  Prints one
// line per check and returns the number of failures.
int run_verify(std::ostream& os);

}  // namespace radvp
