#include "ctrboost/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "ctrboost/error.hpp"

namespace ctrboost {

std::string trim(std::string_view text) {
    std::size_t begin = 0;
    std::size_t end = text.size();
    while (begin < end && std::isspace(static_cast<unsigned char>(text[begin]))) ++begin;
    while (end > begin && std::isspace(static_cast<unsigned char>(text[end - 1]))) --end;
    return std::string(text.substr(begin, end - begin));
}

std::vector<std::string> split_list(const std::string& text, char separator) {
    std::vector<std::string> parts;
    std::string current;
    for (char c : text) {
        if (c == separator) {
            parts.push_back(trim(current));
            current.clear();
        } else {
            current.push_back(c);
        }
    }
    parts.push_back(trim(current));
    if (parts.size() == 1 && parts[0].empty()) parts.clear();
    return parts;
}

KeyValueFile KeyValueFile::parse(std::istream& in, const std::string& origin) {
    KeyValueFile file;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const std::string content = trim(line);
        if (content.empty()) continue;
        const auto eq = content.find('=');
        if (eq == std::string::npos) {
            fail(ErrorCode::parse, origin + ":" + std::to_string(line_no) +
                                       ": expected 'key = value', got '" + content + "'");
        }
        std::string key = trim(std::string_view(content).substr(0, eq));
        std::string value = trim(std::string_view(content).substr(eq + 1));
        if (key.empty()) {
            fail(ErrorCode::parse, origin + ":" + std::to_string(line_no) + ": empty key");
        }
        if (file.contains(key)) {
            fail(ErrorCode::parse,
                 origin + ":" + std::to_string(line_no) + ": duplicate key '" + key + "'");
        }
        file.entries_.emplace_back(std::move(key), std::move(value));
    }
    return file;
}

KeyValueFile KeyValueFile::read(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::io, "cannot open '" + path.string() + "'");
    return parse(in, path.string());
}

std::optional<std::string> KeyValueFile::get(const std::string& key) const {
    for (const auto& [k, v] : entries_) {
        if (k == key) return v;
    }
    return std::nullopt;
}

void KeyValueFile::set(const std::string& key, const std::string& value) {
    for (auto& [k, v] : entries_) {
        if (k == key) {
            v = value;
            return;
        }
    }
    entries_.emplace_back(key, value);
}

std::string KeyValueFile::to_string() const {
    std::ostringstream out;
    for (const auto& [k, v] : entries_) out << k << " = " << v << '\n';
    return out.str();
}

double parse_double(const std::string& text, const std::string& key) {
    const std::string t = trim(text);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
    if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
        fail(ErrorCode::parse, "'" + key + "': expected a number, got '" + text + "'");
    }
    return value;
}

uint64_t parse_uint(const std::string& text, const std::string& key) {
    const std::string t = trim(text);
    uint64_t value = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
    if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
        fail(ErrorCode::parse,
             "'" + key + "': expected a non-negative integer, got '" + text + "'");
    }
    return value;
}

bool parse_bool(const std::string& text, const std::string& key) {
    std::string t = trim(text);
    std::transform(t.begin(), t.end(), t.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (t == "1" || t == "true" || t == "yes" || t == "on") return true;
    if (t == "0" || t == "false" || t == "no" || t == "off") return false;
    fail(ErrorCode::parse, "'" + key + "': expected a boolean, got '" + text + "'");
}

std::string format_double(double value) {
    char buffer[64];
    const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
    return std::string(buffer, ptr);
}

} // namespace ctrboost
