#include "anchormva/csv.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace anchormva {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

static std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv_line(const std::string& line, char delim) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == delim) {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(trim(cur));
    return out;
}

CsvTable read_csv(const std::string& path, char delim) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    CsvTable table;
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty file: " + path);
    table.header = split_csv_line(line, delim);
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        table.rows.push_back(split_csv_line(line, delim));
    }
    return table;
}

}  // namespace anchormva
