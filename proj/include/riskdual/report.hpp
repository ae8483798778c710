#pragma once

#include <iosfwd>
#include <string>
#include <vector>

// Deterministic tabular reports. No timestamps, no locale, fixed float
// formatting, rows emitted in the order they were added: identical inputs
// and seeds give byte-identical files.

namespace riskdual {

struct ReportTable {
    std::string title;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    void add_row(std::vector<std::string> row) { rows.push_back(std::move(row)); }
};

std::string format_number(double v);

void write_csv(std::ostream& out, const ReportTable& table);
void write_markdown(std::ostream& out, const ReportTable& table);

// format = "csv" or "md"; writes <dir>/<stem>.<ext>
void write_table_file(const std::string& dir, const std::string& stem, const std::string& format,
                      const ReportTable& table);

}  // namespace riskdual
