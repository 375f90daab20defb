#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace lmgeo {

// Shortest representation that parses back to the same double.
std::string format_double(double v);

// Fixed-point with the given number of decimals.
std::string format_fixed(double v, int decimals);

// Strict parsers: the whole field must be consumed. Throw FormatError.
double parse_double(std::string_view s);
std::int64_t parse_int(std::string_view s);

}  // namespace lmgeo
