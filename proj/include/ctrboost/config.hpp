#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace ctrboost {

/// Ordered `key = value` text file. `#` starts a comment, blank lines are
/// ignored, keys must be unique.
class KeyValueFile {
public:
    KeyValueFile() = default;

    static KeyValueFile parse(std::istream& in, const std::string& origin = "<stream>");
    static KeyValueFile read(const std::filesystem::path& path);

    const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }
    std::optional<std::string> get(const std::string& key) const;
    bool contains(const std::string& key) const { return get(key).has_value(); }

    /// Replaces an existing value or appends a new entry.
    void set(const std::string& key, const std::string& value);

    std::string to_string() const;

private:
    std::vector<std::pair<std::string, std::string>> entries_;
};

// Strict scalar parsers used by every config surface. Each throws
// Error(parse) naming `key` when the text is not a complete value.
double parse_double(const std::string& text, const std::string& key);
uint64_t parse_uint(const std::string& text, const std::string& key);
bool parse_bool(const std::string& text, const std::string& key);

std::string trim(std::string_view text);
std::vector<std::string> split_list(const std::string& text, char separator = ',');

/// Shortest round-trip decimal form of a double.
std::string format_double(double value);

} // namespace ctrboost
