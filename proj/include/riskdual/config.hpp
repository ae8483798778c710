#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "riskdual/probspace.hpp"
#include "riskdual/riskmeasures.hpp"
#include "riskdual/scenarios.hpp"

// Structured-text ingestion: spaces are one "weight block-label" pair per
// line, scenario lists one density row per line; '#' starts a comment.
// Parse failures carry the line number.

namespace riskdual {

struct ConfigError : std::runtime_error {
    int line;
    ConfigError(int line_no, const std::string& msg)
        : std::runtime_error("line " + std::to_string(line_no) + ": " + msg), line(line_no) {}
};

FilteredSpace parse_space(std::istream& in);
FilteredSpace load_space(const std::string& path);
void write_space(std::ostream& out, const FilteredSpace& sp);

std::vector<ScenarioDensity> parse_scenarios(std::istream& in, const FilteredSpace& sp);
std::vector<ScenarioDensity> load_scenarios(const std::string& path, const FilteredSpace& sp);
void write_scenarios(std::ostream& out, const std::vector<ScenarioDensity>& qs);

// one variable row per line, same format as a scenario row minus validation
std::vector<Rv> parse_rv_rows(std::istream& in, const FilteredSpace& sp);
std::vector<Rv> load_rv_rows(const std::string& path, const FilteredSpace& sp);

// "name" or "name:key=value,key=value"; unknown names throw with the catalog
RiskMeasure parse_measure_spec(const std::string& spec);

}  // namespace riskdual
