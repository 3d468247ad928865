#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace ecc::csv {

struct Row {
    std::size_t line = 0; // 1-based physical line in the file
    std::vector<std::string> fields;
};

struct Table {
    std::vector<std::string> header;
    std::vector<Row> rows;
};

// Plain comma-separated values, no quoting; fields are trimmed of surrounding
// whitespace and a trailing CR. Blank lines are skipped.
Table parse(const std::string& text);

// All floating-point output uses 12 significant digits ("%.12g"), which
// round-trips through parse_number bit-stably.
std::string format_number(double x);

double parse_number(const std::string& s, bool& ok);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& bytes);

// FNV-1a 64 over the raw bytes, as a 16-digit hex string; used for the input
// digests in run reports.
std::string fnv1a_hex(const std::string& bytes);

} // namespace ecc::csv
