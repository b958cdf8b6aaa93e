#include "ebql/csv.hpp"

#include <cstdio>
#include <sstream>

#include "ebql/errors.hpp"

namespace ebql {

std::string csv_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

CsvWriter::CsvWriter(const std::filesystem::path& path, std::vector<std::string> columns)
    : columns_(std::move(columns)), path_(path) {
    if (columns_.empty()) throw SchemaError("CsvWriter: schema must name at least one column");
    out_.open(path, std::ios::binary);  // binary keeps '\n' endings everywhere
    if (!out_) throw IoError("cannot open for writing: " + path.string());
    for (std::size_t i = 0; i < columns_.size(); ++i) {
        if (i) out_ << ',';
        out_ << columns_[i];
    }
    out_ << '\n';
}

void CsvWriter::write_row(std::span<const std::string> cells) {
    if (cells.size() != columns_.size()) {
        const std::size_t at = std::min(cells.size(), columns_.size() - 1);
        throw SchemaError("row has " + std::to_string(cells.size()) + " cells, expected " +
                          std::to_string(columns_.size()) + " (column '" + columns_[at] + "')");
    }
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out_ << ',';
        out_ << cells[i];
    }
    out_ << '\n';
    if (!out_) throw IoError("write failed: " + path_.string());
}

void CsvWriter::close() {
    out_.close();
    if (out_.fail()) throw IoError("close failed: " + path_.string());
}

std::size_t CsvTable::column_index(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
        if (columns[i] == name) return i;
    throw SchemaError("no such column: " + name);
}

CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open for reading: " + path.string());
    CsvTable table;
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (line.empty() || line.back() == ',') cells.push_back("");
        if (header) {
            table.columns = cells;
            header = false;
        } else {
            table.rows.push_back(cells);
        }
    }
    return table;
}

}  // namespace ebql
