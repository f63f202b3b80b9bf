#pragma once

#include <string>

namespace radvp {

// Shortest decimal form that parses back to the same double.
std::string fmt_double(double v);
double parse_double(const std::string& s);

}  // namespace radvp
