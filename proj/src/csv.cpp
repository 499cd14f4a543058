#include "cbjj/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "cbjj/error.hpp"

namespace cbjj {

void CsvTable::add_row(std::vector<double> row)
{
    if (row.size() != header.size())
        raise(ErrorKind::InvalidParameter, "CSV row width " + std::to_string(row.size()) + " does not match header width " +
                                               std::to_string(header.size()));
    rows.push_back(std::move(row));
}

std::size_t CsvTable::column(std::string_view name) const
{
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name)
            return i;
    raise(ErrorKind::NotFound, "CSV has no column '" + std::string(name) + "'");
}

std::string format_double(double x)
{
    if (std::isnan(x))
        return "nan";
    if (std::isinf(x))
        return x > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

double parse_double(std::string_view text)
{
    while (!text.empty() && (text.front() == ' ' || text.front() == '\t'))
        text.remove_prefix(1);
    while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r'))
        text.remove_suffix(1);
    if (!text.empty() && text.front() == '+')
        text.remove_prefix(1);
    double value = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size())
        raise(ErrorKind::InvalidParameter, "not a number: '" + std::string(text) + "'");
    return value;
}

std::string to_csv(const CsvTable& table)
{
    std::string out;
    for (std::size_t i = 0; i < table.header.size(); ++i) {
        if (i)
            out += ',';
        out += table.header[i];
    }
    out += '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i)
                out += ',';
            out += format_double(row[i]);
        }
        out += '\n';
    }
    return out;
}

CsvTable parse_csv(std::string_view text)
{
    CsvTable table;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos)
            end = text.size();
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.remove_suffix(1);
        if (line.empty())
            continue;
        std::vector<std::string_view> cells;
        std::size_t start = 0;
        for (;;) {
            const std::size_t comma = line.find(',', start);
            cells.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
            if (comma == std::string_view::npos)
                break;
            start = comma + 1;
        }
        if (table.header.empty()) {
            for (auto c : cells)
                table.header.emplace_back(c);
            continue;
        }
        if (cells.size() != table.header.size())
            raise(ErrorKind::InvalidParameter, "CSV line " + std::to_string(line_no) + " is not rectangular");
        std::vector<double> row;
        row.reserve(cells.size());
        for (auto c : cells)
            row.push_back(parse_double(c));
        table.rows.push_back(std::move(row));
    }
    if (table.header.empty())
        raise(ErrorKind::InvalidParameter, "CSV has no header row");
    return table;
}

void write_text(const std::filesystem::path& path, std::string_view text)
{
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out)
        raise(ErrorKind::Io, "cannot open " + path.string() + " for writing");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out)
        raise(ErrorKind::Io, "write to " + path.string() + " failed");
}

std::string read_text(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        raise(ErrorKind::Io, "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_csv(const std::filesystem::path& path, const CsvTable& table)
{
    write_text(path, to_csv(table));
}

}  // namespace cbjj
