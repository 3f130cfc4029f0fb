#pragma once

#include <cstdio>
#include <string>
#include <vector>

namespace macgame {

/// Shortest round-trip decimal form; CSV cells written with this re-read to
/// the identical double.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

/// Minimal CSV reader for the schemas this project emits: comma separated,
/// no quoting, first row is the header.
std::vector<std::vector<std::string>> parse_csv(const std::string& text);

void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

}  // namespace macgame
