#include "anchormva/config.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

namespace anchormva {

namespace {

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

double parse_double_value(const std::string& text, const std::string& what) {
    if (text == "inf") return std::numeric_limits<double>::infinity();
    const char* begin = text.c_str();
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end == begin || *end != '\0')
        throw ConfigError("cannot parse number for " + what + ": '" + text + "'");
    return v;
}

Config Config::parse_string(const std::string& text) {
    Config cfg;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("line " + std::to_string(lineno) + ": malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty())
                throw ConfigError("line " + std::to_string(lineno) + ": empty section name");
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
        if (section.empty())
            throw ConfigError("line " + std::to_string(lineno) + ": key outside any [section]");
        std::string full = section + "." + key;
        if (cfg.values_.count(full))
            throw ConfigError("duplicate key: " + full);
        cfg.values_[full] = value;
    }
    return cfg;
}

Config Config::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_string(text);
}

void Config::set_override(const std::string& assignment) {
    auto eq = assignment.find('=');
    if (eq == std::string::npos)
        throw ConfigError("override must look like section.key=value: " + assignment);
    std::string key = trim(assignment.substr(0, eq));
    std::string value = trim(assignment.substr(eq + 1));
    if (key.find('.') == std::string::npos)
        throw ConfigError("override key must be section.key: " + key);
    values_[key] = value;
}

const std::string* Config::find(const std::string& section, const std::string& key) const {
    auto it = values_.find(section + "." + key);
    if (it == values_.end()) return nullptr;
    consumed_.insert(it->first);
    return &it->second;
}

bool Config::has(const std::string& section, const std::string& key) const {
    return values_.count(section + "." + key) > 0;
}

std::string Config::get_string(const std::string& section, const std::string& key,
                               const std::string& fallback) const {
    const std::string* v = find(section, key);
    return v ? *v : fallback;
}

double Config::get_double(const std::string& section, const std::string& key,
                          double fallback) const {
    const std::string* v = find(section, key);
    return v ? parse_double_value(*v, section + "." + key) : fallback;
}

int Config::get_int(const std::string& section, const std::string& key, int fallback) const {
    return static_cast<int>(get_long(section, key, fallback));
}

long Config::get_long(const std::string& section, const std::string& key, long fallback) const {
    const std::string* v = find(section, key);
    if (!v) return fallback;
    double d = parse_double_value(*v, section + "." + key);
    if (std::floor(d) != d) throw ConfigError(section + "." + key + " must be an integer");
    return static_cast<long>(d);
}

bool Config::get_bool(const std::string& section, const std::string& key, bool fallback) const {
    const std::string* v = find(section, key);
    if (!v) return fallback;
    if (*v == "true" || *v == "1" || *v == "yes") return true;
    if (*v == "false" || *v == "0" || *v == "no") return false;
    throw ConfigError(section + "." + key + " must be a boolean, got '" + *v + "'");
}

std::vector<std::string> Config::get_list(const std::string& section, const std::string& key,
                                          const std::vector<std::string>& fallback) const {
    const std::string* v = find(section, key);
    if (!v) return fallback;
    std::vector<std::string> out;
    std::string cur;
    for (char c : *v) {
        if (c == ',') {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(trim(cur));
    return out;
}

std::vector<double> Config::get_double_list(const std::string& section, const std::string& key,
                                            const std::vector<double>& fallback) const {
    if (!has(section, key)) return fallback;
    std::vector<double> out;
    for (const auto& s : get_list(section, key, {}))
        out.push_back(parse_double_value(s, section + "." + key));
    return out;
}

std::vector<int> Config::get_int_list(const std::string& section, const std::string& key,
                                      const std::vector<int>& fallback) const {
    if (!has(section, key)) return fallback;
    std::vector<int> out;
    for (const auto& s : get_list(section, key, {})) {
        double d = parse_double_value(s, section + "." + key);
        if (std::floor(d) != d) throw ConfigError(section + "." + key + " must list integers");
        out.push_back(static_cast<int>(d));
    }
    return out;
}

std::map<std::string, std::string> Config::section(const std::string& name) const {
    std::map<std::string, std::string> out;
    const std::string prefix = name + ".";
    for (const auto& [key, value] : values_) {
        if (key.rfind(prefix, 0) == 0) {
            out[key.substr(prefix.size())] = value;
            consumed_.insert(key);
        }
    }
    return out;
}

void Config::ensure_all_consumed() const {
    std::string unknown;
    for (const auto& [key, value] : values_) {
        (void)value;
        if (!consumed_.count(key)) unknown += (unknown.empty() ? "" : ", ") + key;
    }
    if (!unknown.empty()) throw ConfigError("unknown config keys: " + unknown);
}

}  // namespace anchormva
