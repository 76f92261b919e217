#include "geode/types.hpp"

#include <charconv>
#include <cmath>

namespace geode {

ParseError::ParseError(const std::string& what, std::size_t offset_)
    : Error(what + " (at byte " + std::to_string(offset_) + ")"), offset(offset_) {}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

}  // namespace geode
