#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace fbar {

std::string trim(std::string_view s);
std::vector<std::string> split_ws(std::string_view s);
std::vector<std::string> split_char(std::string_view s, char sep);
std::string lower(std::string_view s);

// strict scalar parsing: the whole token must be consumed
double parse_double(const std::string& tok, const std::string& what);
long parse_long(const std::string& tok, const std::string& what);

// shortest round-trip-ish formatting at a fixed significant-digit count
std::string fmt_g(double v, int sig = 12);

// strips an inline comment starting at `mark`, then trims
std::string strip_comment(std::string_view line, char mark);

} // namespace fbar
