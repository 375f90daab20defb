#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace lmgeo {

// Splits on whitespace after isolating ASCII punctuation and the copyright
// sign as standalone tokens: "Ely, NV 89301" -> {"Ely", ",", "NV", "89301"}.
std::vector<std::string> tokenize(std::string_view text);

std::string to_lower(std::string_view s);

std::string join(std::span<const std::string> tokens, std::string_view sep = " ");

std::string_view trim(std::string_view s);

// Splits on a single character; keeps empty fields.
std::vector<std::string> split(std::string_view s, char delim);

struct KeyValue {
  std::string key;
  std::string value;
  int line = 0;
};

// Flat "key = value" lines; blank lines and '#' comments are skipped.
// Throws FormatError (with the line number) on a line without '=' or with
// an empty key.
std::vector<KeyValue> read_key_values(std::istream& in);

inline constexpr std::string_view kCopyrightSign = "\xC2\xA9";

}  // namespace lmgeo
