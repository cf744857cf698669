#include <charconv>
#include <fstream>
#include <sstream>

#include "tigt/config.hpp"
#include "tigt/errors.hpp"

namespace tigt {
namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

template <class T>
T parse_number(const std::string& key, const std::string& value, const char* what) {
    const std::string v = trim(value);
    T out{};
    const auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (v.empty() || ec != std::errc() || end != v.data() + v.size()) {
        throw ConfigError(key + ": expected " + what + ", got '" + value + "'");
    }
    return out;
}

std::vector<std::string> split_commas(const std::string& value) {
    std::vector<std::string> parts;
    std::stringstream in(value);
    std::string part;
    while (std::getline(in, part, ',')) parts.push_back(part);
    return parts;
}

}  // namespace

KeyValues parse_key_values(std::istream& in) {
    KeyValues out;
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ParseError(number, "expected 'key = value', got '" + line + "'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ParseError(number, "empty key");
        if (!out.emplace(key, value).second) throw ParseError(number, "duplicate key '" + key + "'");
    }
    return out;
}

KeyValues read_key_values(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file " + path.string());
    return parse_key_values(in);
}

void write_key_values(const KeyValues& values, std::ostream& out) {
    for (const auto& [k, v] : values) out << k << " = " << v << '\n';
}

std::size_t parse_count(const std::string& key, const std::string& value) {
    return parse_number<std::size_t>(key, value, "a non-negative integer");
}

std::int64_t parse_integer(const std::string& key, const std::string& value) {
    return parse_number<std::int64_t>(key, value, "an integer");
}

double parse_real(const std::string& key, const std::string& value) {
    return parse_number<double>(key, value, "a real number");
}

bool parse_bool(const std::string& key, const std::string& value) {
    const std::string v = trim(value);
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ConfigError(key + ": expected true or false, got '" + value + "'");
}

std::vector<std::int64_t> parse_integer_list(const std::string& key, const std::string& value) {
    std::vector<std::int64_t> out;
    for (const auto& part : split_commas(value)) out.push_back(parse_integer(key, part));
    if (out.empty()) throw ConfigError(key + ": expected a comma-separated list");
    return out;
}

std::vector<double> parse_real_list(const std::string& key, const std::string& value) {
    std::vector<double> out;
    for (const auto& part : split_commas(value)) out.push_back(parse_real(key, part));
    if (out.empty()) throw ConfigError(key + ": expected a comma-separated list");
    return out;
}

}  // namespace tigt
