#include "wikinli/ini.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "wikinli/errors.hpp"

namespace wikinli {

namespace {

std::string trim(const std::string& s) {
    size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

}  // namespace

IniFile IniFile::load(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw ConfigError("cannot open config file: " + file.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str(), file.string());
}

IniFile IniFile::parse(const std::string& text, const std::string& origin) {
    IniFile ini;
    ini.origin_ = origin;
    std::istringstream in(text);
    std::string line, section;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[') {
            if (t.back() != ']') {
                throw ConfigError(origin + ":" + std::to_string(lineno) + ": unterminated section");
            }
            section = trim(t.substr(1, t.size() - 2));
            continue;
        }
        const size_t eq = t.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected key = value");
        }
        ini.sections_[section][trim(t.substr(0, eq))] = trim(t.substr(eq + 1));
    }
    return ini;
}

bool IniFile::has(const std::string& section, const std::string& key) const {
    auto s = sections_.find(section);
    return s != sections_.end() && s->second.count(key) > 0;
}

std::optional<std::string> IniFile::get(const std::string& section, const std::string& key) const {
    auto s = sections_.find(section);
    if (s == sections_.end()) return std::nullopt;
    auto k = s->second.find(key);
    if (k == s->second.end()) return std::nullopt;
    return k->second;
}

std::string IniFile::get_or(const std::string& section, const std::string& key,
                            const std::string& fallback) const {
    return get(section, key).value_or(fallback);
}

std::string IniFile::require(const std::string& section, const std::string& key) const {
    auto v = get(section, key);
    if (!v) throw ConfigError(origin_ + ": missing [" + section + "] " + key);
    return *v;
}

namespace {

template <typename T, typename Fn>
T parse_number(const std::optional<std::string>& v, T fallback, Fn fn, const std::string& what) {
    if (!v) return fallback;
    try {
        size_t used = 0;
        T out = fn(*v, &used);
        if (used != v->size()) throw std::invalid_argument("trailing characters");
        return out;
    } catch (const std::exception&) {
        throw ConfigError("bad " + what + " value: '" + *v + "'");
    }
}

}  // namespace

int64_t IniFile::get_int(const std::string& section, const std::string& key, int64_t fallback) const {
    return parse_number<int64_t>(
        get(section, key), fallback,
        [](const std::string& s, size_t* used) { return std::stoll(s, used); }, section + "." + key);
}

uint64_t IniFile::get_uint(const std::string& section, const std::string& key,
                           uint64_t fallback) const {
    return parse_number<uint64_t>(
        get(section, key), fallback,
        [](const std::string& s, size_t* used) { return std::stoull(s, used); }, section + "." + key);
}

double IniFile::get_double(const std::string& section, const std::string& key,
                           double fallback) const {
    return parse_number<double>(
        get(section, key), fallback,
        [](const std::string& s, size_t* used) { return std::stod(s, used); }, section + "." + key);
}

bool IniFile::get_bool(const std::string& section, const std::string& key, bool fallback) const {
    auto v = get(section, key);
    if (!v) return fallback;
    if (*v == "true" || *v == "1" || *v == "yes" || *v == "on") return true;
    if (*v == "false" || *v == "0" || *v == "no" || *v == "off") return false;
    throw ConfigError("bad boolean value for " + section + "." + key + ": '" + *v + "'");
}

std::vector<std::string> IniFile::get_list(const std::string& section, const std::string& key) const {
    std::vector<std::string> out;
    auto v = get(section, key);
    if (!v) return out;
    size_t pos = 0;
    while (pos <= v->size()) {
        const size_t comma = v->find(',', pos);
        const std::string item =
            trim(v->substr(pos, comma == std::string::npos ? std::string::npos : comma - pos));
        if (!item.empty()) out.push_back(item);
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return out;
}

std::vector<double> IniFile::get_double_list(const std::string& section,
                                             const std::string& key) const {
    std::vector<double> out;
    for (const std::string& item : get_list(section, key)) {
        try {
            size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument("trailing characters");
        } catch (const std::exception&) {
            throw ConfigError("bad number '" + item + "' in " + section + "." + key);
        }
    }
    return out;
}

}  // namespace wikinli
