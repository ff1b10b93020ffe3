#pragma once

#include <charconv>
#include <string>

namespace qpki {

// Shortest representation that round-trips through a double exactly.
inline std::string fmt_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

// RFC 4180 field quoting: wrap in quotes when the field contains a comma,
// quote or newline; embedded quotes are doubled.
inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace qpki
