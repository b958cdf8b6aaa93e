#pragma once

#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

namespace ebql {

// Formats a double with 17 significant digits; round-trips bit-exactly.
std::string csv_double(double v);

// CSV with a fixed column schema: header row, UTF-8, '\n' line endings.
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, std::vector<std::string> columns);

    void write_row(std::span<const std::string> cells);
    void close();

    const std::vector<std::string>& columns() const { return columns_; }

private:
    std::vector<std::string> columns_;
    std::filesystem::path path_;
    std::ofstream out_;
};

struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    std::size_t column_index(const std::string& name) const;
};

CsvTable read_csv(const std::filesystem::path& path);

}  // namespace ebql
