#include "rlscape/io/csv.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "rlscape/io/format.hpp"

namespace rlscape {

namespace {

bool needs_quoting(const std::string& cell) {
    return cell.find_first_of(",\"\n\r") != std::string::npos;
}

void write_cell(std::ostringstream& out, const std::string& cell) {
    if (!needs_quoting(cell)) {
        out << cell;
        return;
    }
    out << '"';
    for (const char c : cell) {
        if (c == '"') out << '"';
        out << c;
    }
    out << '"';
}

void write_row(std::ostringstream& out, const std::vector<std::string>& row) {
    for (std::size_t i = 0; i < row.size(); ++i) {
        if (i) out << ',';
        write_cell(out, row[i]);
    }
    out << '\n';
}

}  // namespace

void CsvTable::add_row(std::vector<std::string> cells) {
    if (cells.size() != header.size())
        throw std::invalid_argument("CsvTable: row has " + std::to_string(cells.size()) +
                                    " cells, header has " + std::to_string(header.size()));
    rows.push_back(std::move(cells));
}

std::size_t CsvTable::column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) return i;
    }
    throw std::invalid_argument("CsvTable: no column named '" + name + "'");
}

std::string csv_cell(double v) { return format_double(v); }
std::string csv_cell(std::int64_t v) { return std::to_string(v); }
std::string csv_cell(std::uint64_t v) { return std::to_string(v); }
std::string csv_cell(int v) { return std::to_string(v); }
std::string csv_cell(bool v) { return v ? "true" : "false"; }

std::string to_csv_text(const CsvTable& table) {
    std::ostringstream out;
    write_row(out, table.header);
    for (const auto& row : table.rows) {
        if (row.size() != table.header.size())
            throw std::invalid_argument("to_csv_text: ragged row");
        write_row(out, row);
    }
    return out.str();
}

CsvTable parse_csv_text(const std::string& text) {
    // Character-level parse so quoted cells may contain commas and newlines.
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> row;
    std::string cell;
    bool in_quotes = false;
    bool row_started = false;
    std::size_t line_no = 1;

    const auto end_cell = [&] {
        row.push_back(std::move(cell));
        cell.clear();
    };
    const auto end_row = [&] {
        end_cell();
        records.push_back(std::move(row));
        row.clear();
        row_started = false;
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    cell += '"';
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                cell += c;
                if (c == '\n') ++line_no;
            }
            continue;
        }
        switch (c) {
            case '"':
                if (!cell.empty())
                    throw std::runtime_error("csv line " + std::to_string(line_no) +
                                             ": quote inside unquoted cell");
                in_quotes = true;
                row_started = true;
                break;
            case ',':
                end_cell();
                row_started = true;
                break;
            case '\r':
                if (i + 1 >= text.size() || text[i + 1] != '\n')
                    throw std::runtime_error("csv line " + std::to_string(line_no) +
                                             ": bare carriage return");
                break;  // consumed by the following '\n'
            case '\n':
                end_row();
                ++line_no;
                break;
            default:
                cell += c;
                row_started = true;
                break;
        }
    }
    if (in_quotes) throw std::runtime_error("csv: unterminated quoted cell");
    if (row_started || !cell.empty() || !row.empty()) end_row();  // final line without newline

    if (records.empty()) throw std::runtime_error("csv: empty input");
    CsvTable table;
    table.header = std::move(records.front());
    for (std::size_t i = 1; i < records.size(); ++i) {
        if (records[i].size() != table.header.size())
            throw std::runtime_error("csv row " + std::to_string(i + 1) + ": expected " +
                                     std::to_string(table.header.size()) + " cells, found " +
                                     std::to_string(records[i].size()));
        table.rows.push_back(std::move(records[i]));
    }
    return table;
}

void save_csv(const std::string& path, const CsvTable& table) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write csv file: " + path);
    out << to_csv_text(table);
    if (!out) throw std::runtime_error("failed writing csv file: " + path);
}

CsvTable load_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open csv file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_csv_text(buf.str());
}

}  // namespace rlscape
