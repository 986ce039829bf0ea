#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace wikinli {

// Minimal INI reader: [sections], key = value, '#' or ';' comments.
class IniFile {
public:
    static IniFile load(const std::filesystem::path& file);
    static IniFile parse(const std::string& text, const std::string& origin);

    bool has(const std::string& section, const std::string& key) const;
    std::optional<std::string> get(const std::string& section, const std::string& key) const;
    std::string get_or(const std::string& section, const std::string& key,
                       const std::string& fallback) const;
    std::string require(const std::string& section, const std::string& key) const;

    int64_t get_int(const std::string& section, const std::string& key, int64_t fallback) const;
    uint64_t get_uint(const std::string& section, const std::string& key, uint64_t fallback) const;
    double get_double(const std::string& section, const std::string& key, double fallback) const;
    bool get_bool(const std::string& section, const std::string& key, bool fallback) const;
    // Comma-separated list, items trimmed, empties dropped.
    std::vector<std::string> get_list(const std::string& section, const std::string& key) const;
    std::vector<double> get_double_list(const std::string& section, const std::string& key) const;

private:
    std::map<std::string, std::map<std::string, std::string>> sections_;
    std::string origin_;
};

}  // namespace wikinli
