#pragma once

#include <charconv>
#include <string>
#include <system_error>

namespace dflrb {

// Shortest decimal string that round-trips the double, so emitted CSVs are
// bit-reproducible and lossless.
inline std::string format_double(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return ec == std::errc{} ? std::string(buf, ptr) : std::string("nan");
}

}  // namespace dflrb
