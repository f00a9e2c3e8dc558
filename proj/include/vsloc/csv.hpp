#pragma once

#include <charconv>
#include <string>
#include <system_error>

namespace vsloc {

/// Shortest decimal string that round-trips the exact double.  Keeps CSV
/// output byte-stable across runs and platforms with the same FP results.
inline std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

/// Quotes a field if it contains a separator, quote, or newline.
inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace vsloc
