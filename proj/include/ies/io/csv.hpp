#ifndef IES_IO_CSV_HPP
#define IES_IO_CSV_HPP

#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

namespace ies::io {

/// Shortest round-trip text for a double; locale independent.
inline std::string format_double(double v)
{
    if (std::isnan(v)) return "NA";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (v == 0.0) return "0";
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return {buf, res.ptr};
}

inline std::string cell(double v) { return format_double(v); }
inline std::string cell(std::int64_t v) { return std::to_string(v); }
inline std::string cell(std::uint64_t v) { return std::to_string(v); }
inline std::string cell(int v) { return std::to_string(v); }
inline std::string cell(std::string_view v) { return std::string(v); }
inline std::string cell(const char* v) { return v; }
inline std::string cell(const std::string& v) { return v; }

/// Header line, rows, and a leading "# " metadata line.
struct CsvTable {
    std::string metadata;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    template <class... T>
    void add(const T&... values)
    {
        rows.push_back({cell(values)...});
    }
};

namespace detail {

inline void write_line(std::ostream& out, const std::vector<std::string>& fields)
{
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out << ',';
        const std::string& f = fields[i];
        if (f.find_first_of(",\"\n") != std::string::npos) {
            out << '"';
            for (char ch : f) {
                if (ch == '"') out << '"';
                out << ch;
            }
            out << '"';
        } else {
            out << f;
        }
    }
    out << '\n';
}

} // namespace detail

inline void write_csv(std::ostream& out, const CsvTable& table)
{
    if (!table.metadata.empty()) {
        out << "# " << table.metadata << '\n';
    }
    detail::write_line(out, table.header);
    for (const auto& row : table.rows) {
        if (row.size() != table.header.size()) {
            throw std::logic_error("csv row width does not match header");
        }
        detail::write_line(out, row);
    }
}

inline void write_csv(const std::filesystem::path& path, const CsvTable& table)
{
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::system_error(errno, std::generic_category(), "cannot open " + path.string());
    }
    write_csv(out, table);
}

} // namespace ies::io

#endif // IES_IO_CSV_HPP
