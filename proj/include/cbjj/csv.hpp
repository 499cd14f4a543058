#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace cbjj {

/// Rectangular numeric table with a header row.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    void add_row(std::vector<double> row);
    std::size_t column(std::string_view name) const;
};

/// Shortest round-trip decimal form (at most 17 significant digits), locale independent.
std::string format_double(double x);

/// Locale-independent parse; accepts "nan", "inf", "-inf".
double parse_double(std::string_view text);

std::string to_csv(const CsvTable& table);
CsvTable parse_csv(std::string_view text);

void write_text(const std::filesystem::path& path, std::string_view text);
std::string read_text(const std::filesystem::path& path);
void write_csv(const std::filesystem::path& path, const CsvTable& table);

}  // namespace cbjj
