#pragma once

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace anchormva {

/// Bad configuration (maps to CLI exit code 2).
class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Flat key-value configuration with [section] headers, '#' comments and
/// `key = value` lines. Values are bare strings; lists are comma-separated.
/// Every key must be consumed by the command that runs, otherwise
/// ensure_all_consumed() reports the leftovers as unknown keys.
class Config {
  public:
    static Config parse_file(const std::string& path);
    static Config parse_string(const std::string& text);

    /// "--set section.key=value" style override.
    void set_override(const std::string& assignment);

    bool has(const std::string& section, const std::string& key) const;

    std::string get_string(const std::string& section, const std::string& key,
                           const std::string& fallback) const;
    double get_double(const std::string& section, const std::string& key, double fallback) const;
    int get_int(const std::string& section, const std::string& key, int fallback) const;
    long get_long(const std::string& section, const std::string& key, long fallback) const;
    bool get_bool(const std::string& section, const std::string& key, bool fallback) const;
    std::vector<std::string> get_list(const std::string& section, const std::string& key,
                                      const std::vector<std::string>& fallback) const;
    std::vector<double> get_double_list(const std::string& section, const std::string& key,
                                        const std::vector<double>& fallback) const;
    std::vector<int> get_int_list(const std::string& section, const std::string& key,
                                  const std::vector<int>& fallback) const;

    /// All keys in a section (e.g. the [roles] column map).
    std::map<std::string, std::string> section(const std::string& name) const;

    void ensure_all_consumed() const;

  private:
    std::map<std::string, std::string> values_;  // "section.key" -> value
    mutable std::set<std::string> consumed_;

    const std::string* find(const std::string& section, const std::string& key) const;
};

double parse_double_value(const std::string& text, const std::string& what);

}  // namespace anchormva
