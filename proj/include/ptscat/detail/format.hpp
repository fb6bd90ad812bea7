#pragma once

#include <charconv>
#include <cstdio>
#include <string>
#include <system_error>

namespace ptscat::detail {

// Locale-independent decimal formatting, 17 significant digits, so output
// files are byte-stable across environments.
inline std::string format_double(double v) {
  char buf[48];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v,
                                 std::chars_format::general, 17);
  if (res.ec != std::errc{}) return "nan";
  return std::string(buf, res.ptr);
}

inline void append_csv_field(std::string& line, double v, bool first = false) {
  if (!first) line.push_back(',');
  line += format_double(v);
}

// Shortest round-trip form, for labels and file names.
inline std::string format_double_short(double v) {
  char buf[48];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  if (res.ec != std::errc{}) return "nan";
  return std::string(buf, res.ptr);
}

}  // namespace ptscat::detail
