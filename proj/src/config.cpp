#include "riskdual/config.hpp"

#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>

namespace riskdual {

namespace {

// strip comments and surrounding whitespace; empty result means skip the line
std::string clean(const std::string& raw) {
    std::string s = raw;
    auto hash = s.find('#');
    if (hash != std::string::npos) s.erase(hash);
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<double> parse_doubles(const std::string& s, int line_no) {
    std::istringstream iss(s);
    std::vector<double> out;
    double v;
    while (iss >> v) out.push_back(v);
    if (!iss.eof()) throw ConfigError(line_no, "expected numeric fields, got '" + s + "'");
    return out;
}

}  // namespace

FilteredSpace parse_space(std::istream& in) {
    std::vector<double> weights;
    std::vector<int> labels;
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string s = clean(raw);
        if (s.empty()) continue;
        std::istringstream iss(s);
        double w;
        int label;
        if (!(iss >> w >> label))
            throw ConfigError(line_no, "expected 'weight block-label', got '" + s + "'");
        std::string rest;
        if (iss >> rest) throw ConfigError(line_no, "trailing field '" + rest + "'");
        weights.push_back(w);
        labels.push_back(label);
    }
    if (weights.empty()) throw ConfigError(line_no, "space file holds no atoms");
    try {
        return FilteredSpace(std::move(weights), labels);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(line_no, e.what());
    }
}

FilteredSpace load_space(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(0, "cannot open space file '" + path + "'");
    return parse_space(in);
}

void write_space(std::ostream& out, const FilteredSpace& sp) {
    out << "# weight block\n";
    char buf[64];
    for (int a = 0; a < sp.atom_count(); ++a) {
        std::snprintf(buf, sizeof buf, "%.17g %d\n", sp.weight(a), sp.block_of(a));
        out << buf;
    }
}

std::vector<ScenarioDensity> parse_scenarios(std::istream& in, const FilteredSpace& sp) {
    std::vector<ScenarioDensity> out;
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string s = clean(raw);
        if (s.empty()) continue;
        std::vector<double> vals = parse_doubles(s, line_no);
        if (static_cast<int>(vals.size()) != sp.atom_count())
            throw ConfigError(line_no, "density row has " + std::to_string(vals.size()) +
                                           " fields, space has " +
                                           std::to_string(sp.atom_count()) + " atoms");
        ScenarioDensity q{std::move(vals)};
        if (!validate_scenario(q, sp))
            throw ConfigError(line_no,
                              "density row violates nonnegativity or the unit conditional mean");
        out.push_back(std::move(q));
    }
    return out;
}

std::vector<ScenarioDensity> load_scenarios(const std::string& path, const FilteredSpace& sp) {
    std::ifstream in(path);
    if (!in) throw ConfigError(0, "cannot open scenario file '" + path + "'");
    return parse_scenarios(in, sp);
}

void write_scenarios(std::ostream& out, const std::vector<ScenarioDensity>& qs) {
    char buf[64];
    for (const auto& q : qs) {
        for (std::size_t i = 0; i < q.z.size(); ++i) {
            std::snprintf(buf, sizeof buf, i + 1 < q.z.size() ? "%.17g " : "%.17g\n", q.z[i]);
            out << buf;
        }
    }
}

std::vector<Rv> parse_rv_rows(std::istream& in, const FilteredSpace& sp) {
    std::vector<Rv> out;
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string s = clean(raw);
        if (s.empty()) continue;
        std::vector<double> vals = parse_doubles(s, line_no);
        if (static_cast<int>(vals.size()) != sp.atom_count())
            throw ConfigError(line_no, "row has " + std::to_string(vals.size()) +
                                           " fields, space has " +
                                           std::to_string(sp.atom_count()) + " atoms");
        out.push_back(std::move(vals));
    }
    return out;
}

std::vector<Rv> load_rv_rows(const std::string& path, const FilteredSpace& sp) {
    std::ifstream in(path);
    if (!in) throw ConfigError(0, "cannot open file '" + path + "'");
    return parse_rv_rows(in, sp);
}

RiskMeasure parse_measure_spec(const std::string& spec) {
    std::string name = spec;
    std::map<std::string, double> params;
    auto colon = spec.find(':');
    if (colon != std::string::npos) {
        name = spec.substr(0, colon);
        std::string rest = spec.substr(colon + 1);
        std::istringstream iss(rest);
        std::string kv;
        while (std::getline(iss, kv, ',')) {
            auto eq = kv.find('=');
            if (eq == std::string::npos)
                throw ConfigError(0, "measure parameter '" + kv + "' is not key=value");
            std::string key = kv.substr(0, eq);
            try {
                params[key] = std::stod(kv.substr(eq + 1));
            } catch (...) {
                throw ConfigError(0, "measure parameter '" + kv + "' has a non-numeric value");
            }
        }
    }
    auto need = [&](const char* key, double fallback, bool required) {
        auto it = params.find(key);
        if (it != params.end()) return it->second;
        if (required) throw ConfigError(0, std::string("measure '") + name +
                                               "' needs parameter '" + key + "'");
        return fallback;
    };
    try {
        if (name == "expected_loss") return expected_loss_measure();
        if (name == "worst_case") return worst_case_measure();
        if (name == "entropic") return entropic_measure(need("gamma", 1.0, false));
        if (name == "cert_equiv") return certainty_equivalent_measure(need("kappa", 32.0, false));
        if (name == "conditional_var")
            return conditional_var_measure(need("lambda", 0.0, true));
        if (name == "pathological_infinite") {
            double mask = need("blocks", 1.0, false);
            return pathological_infinite_measure(GSet{static_cast<std::uint32_t>(mask)});
        }
    } catch (const std::invalid_argument& e) {
        throw ConfigError(0, e.what());
    }
    std::string listing;
    for (const auto& n : catalog_names()) listing += "\n  " + n;
    throw ConfigError(0, "unknown measure '" + name + "'; the catalog is:" + listing);
}

}  // namespace riskdual
