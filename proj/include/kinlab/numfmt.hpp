#pragma once

#include <charconv>
#include <string>

namespace kinlab {

/// Shortest decimal representation that round-trips to the same double.
/// Locale-independent, so emitted files are byte-stable.
inline std::string format_double(double x) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

} // namespace kinlab
