#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace rlscape {

// In-memory CSV table: a header row plus data rows of string cells. Reals
// are written with shortest-round-trip formatting, so emit -> parse -> emit
// is byte-stable and parsing an emitted table reproduces every cell exactly.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    // Appends a row; throws std::invalid_argument when the cell count does
    // not match the header.
    void add_row(std::vector<std::string> cells);

    std::size_t column(const std::string& name) const;  // throws when absent
    bool operator==(const CsvTable&) const = default;
};

// Cell constructors.
std::string csv_cell(double v);
std::string csv_cell(std::int64_t v);
std::string csv_cell(std::uint64_t v);  // also covers std::size_t
std::string csv_cell(int v);
std::string csv_cell(bool v);

// RFC-4180-style quoting: cells containing commas, quotes, or newlines are
// quoted, embedded quotes doubled. Lines end with '\n'.
std::string to_csv_text(const CsvTable& table);

// Parses text produced by to_csv_text (also accepts \r\n line endings).
// Throws std::runtime_error with a line number on malformed input.
CsvTable parse_csv_text(const std::string& text);

void save_csv(const std::string& path, const CsvTable& table);
CsvTable load_csv(const std::string& path);

}  // namespace rlscape
