#include "radvp/format.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

namespace radvp {

std::string fmt_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& s) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  while (first < last && *first == ' ') ++first;
  if (last - first >= 3 && (std::string(first, 3) == "nan" || std::string(first, 4) == "-nan"))
    return std::nan("");
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc{} || res.ptr != last) throw std::invalid_argument("bad number: " + s);
  return v;
}

}  // namespace radvp
