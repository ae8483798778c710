#include "riskdual/report.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <stdexcept>

namespace riskdual {

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

void write_csv(std::ostream& out, const ReportTable& table) {
    for (std::size_t i = 0; i < table.columns.size(); ++i)
        out << table.columns[i] << (i + 1 < table.columns.size() ? "," : "");
    out << "\n";
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i)
            out << row[i] << (i + 1 < row.size() ? "," : "");
        out << "\n";
    }
}

void write_markdown(std::ostream& out, const ReportTable& table) {
    if (!table.title.empty()) out << "## " << table.title << "\n\n";
    out << "|";
    for (const auto& c : table.columns) out << " " << c << " |";
    out << "\n|";
    for (std::size_t i = 0; i < table.columns.size(); ++i) out << "---|";
    out << "\n";
    for (const auto& row : table.rows) {
        out << "|";
        for (const auto& cell : row) out << " " << cell << " |";
        out << "\n";
    }
    out << "\n";
}

void write_table_file(const std::string& dir, const std::string& stem, const std::string& format,
                      const ReportTable& table) {
    std::filesystem::create_directories(dir);
    std::string path = dir + "/" + stem + (format == "md" ? ".md" : ".csv");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write report file '" + path + "'");
    if (format == "md") write_markdown(out, table);
    else write_csv(out, table);
}

}  // namespace riskdual
