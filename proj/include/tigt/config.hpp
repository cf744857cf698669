#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace tigt {

using KeyValues = std::map<std::string, std::string>;

// Flat configuration grammar, one setting per line:
//
//   # comment
//   key = value      (whitespace around key and value is trimmed)
//
// Blank lines are ignored. A repeated key or a line without '=' throws
// ParseError with the line number.
KeyValues parse_key_values(std::istream& in);
KeyValues read_key_values(const std::filesystem::path& path);
void write_key_values(const KeyValues& values, std::ostream& out);

// Typed accessors; malformed values throw ConfigError naming the key.
std::size_t parse_count(const std::string& key, const std::string& value);
std::int64_t parse_integer(const std::string& key, const std::string& value);
double parse_real(const std::string& key, const std::string& value);
bool parse_bool(const std::string& key, const std::string& value);
// Comma-separated integers, e.g. "0,1,2,3".
std::vector<std::int64_t> parse_integer_list(const std::string& key, const std::string& value);
std::vector<double> parse_real_list(const std::string& key, const std::string& value);

}  // namespace tigt
