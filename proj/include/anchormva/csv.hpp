#pragma once

#include <string>
#include <vector>

namespace anchormva {

/// Formats a double with full round-trip precision ("%.17g"), so CSV output
/// is byte-stable across runs and thread counts.
std::string format_double(double v);

/// Splits one CSV line on `delim`. No quoting support; fields are trimmed of
/// surrounding whitespace and a trailing '\r'.
std::vector<std::string> split_csv_line(const std::string& line, char delim);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

/// Reads a delimited text file with one header row. Throws std::runtime_error
/// if the file cannot be opened or is empty.
CsvTable read_csv(const std::string& path, char delim = ',');

}  // namespace anchormva
