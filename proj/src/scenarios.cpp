#include "riskdual/scenarios.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>

namespace riskdual {

namespace {

constexpr double kMeanTol = 1e-10;

// integer compositions of `total` into `parts` parts, lexicographic
void enumerate_compositions(int total, int parts, std::vector<int>& cur,
                            const std::function<void(const std::vector<int>&)>& emit) {
    if (parts == 1) {
        cur.push_back(total);
        emit(cur);
        cur.pop_back();
        return;
    }
    for (int t = total; t >= 0; --t) {
        cur.push_back(t);
        enumerate_compositions(total - t, parts - 1, cur, emit);
        cur.pop_back();
    }
}

std::uint64_t compositions_count(int total, int parts) {
    // C(total + parts - 1, parts - 1), saturating
    std::uint64_t r = 1;
    for (int i = 1; i <= parts - 1; ++i) {
        r = r * static_cast<std::uint64_t>(total + i) / static_cast<std::uint64_t>(i);
        if (r > (1ull << 62)) return 1ull << 62;
    }
    return r;
}

}  // namespace

bool validate_scenario(const ScenarioDensity& q, const FilteredSpace& sp) {
    if (static_cast<int>(q.z.size()) != sp.atom_count()) return false;
    for (double v : q.z)
        if (!(v >= 0.0) || !std::isfinite(v)) return false;
    for (int b = 0; b < sp.block_count(); ++b) {
        double mean = 0.0;
        for (int a : sp.block_atoms(b)) mean += sp.cond_weight(a) * q.z[a];
        if (std::abs(mean - 1.0) > kMeanTol) return false;
    }
    return true;
}

Rv q_conditional_expectation(const ScenarioDensity& q, const Rv& x, const FilteredSpace& sp) {
    if (!validate_scenario(q, sp)) throw std::invalid_argument("scenario density invalid");
    validate_rv(x, sp);
    Rv zx(sp.atom_count());
    for (int a = 0; a < sp.atom_count(); ++a) {
        if (!std::isfinite(x[a])) {
            // zero density kills the atom; positive density propagates the sign
            zx[a] = (q.z[a] == 0.0) ? 0.0 : x[a];
        } else {
            zx[a] = q.z[a] * x[a];
        }
    }
    return conditional_expectation(zx, sp);
}

ScenarioDensity paste_scenarios(const ScenarioDensity& z1, const ScenarioDensity& z2, GSet f,
                                const FilteredSpace& sp) {
    if (!validate_scenario(z1, sp) || !validate_scenario(z2, sp))
        throw std::invalid_argument("paste_scenarios: inputs must be valid densities");
    ScenarioDensity out{Rv(sp.atom_count())};
    for (int a = 0; a < sp.atom_count(); ++a)
        out.z[a] = f.contains(sp.block_of(a)) ? z1.z[a] : z2.z[a];
    return out;
}

ScenarioDensity reference_density(const FilteredSpace& sp) {
    return ScenarioDensity{Rv(sp.atom_count(), 1.0)};
}

ScenarioDensity vertex_density(const FilteredSpace& sp, int block, int atom) {
    if (sp.block_of(atom) != block)
        throw std::invalid_argument("vertex_density: atom not in block");
    ScenarioDensity out = reference_density(sp);
    for (int a : sp.block_atoms(block)) out.z[a] = 0.0;
    out.z[atom] = 1.0 / sp.cond_weight(atom);
    return out;
}

ScenarioDensity random_density(const FilteredSpace& sp, Rng& rng) {
    ScenarioDensity out{Rv(sp.atom_count())};
    for (int b = 0; b < sp.block_count(); ++b) {
        double mean = 0.0;
        for (int a : sp.block_atoms(b)) {
            out.z[a] = rng.uniform(0.05, 1.0);
            mean += sp.cond_weight(a) * out.z[a];
        }
        for (int a : sp.block_atoms(b)) out.z[a] /= mean;
    }
    return out;
}

std::vector<std::vector<double>> block_scenario_grid(const FilteredSpace& sp, int block,
                                                     int resolution, std::uint64_t cap) {
    if (resolution < 1) throw std::invalid_argument("scenario grid: resolution must be >= 1");
    const auto& atoms = sp.block_atoms(block);
    const int k = static_cast<int>(atoms.size());
    std::uint64_t count = compositions_count(resolution, k);
    if (count > cap)
        throw std::invalid_argument("scenario grid: block lattice has " + std::to_string(count) +
                                    " points, above the cap of " + std::to_string(cap));

    std::vector<std::vector<double>> out;
    out.reserve(count + 1);
    std::vector<int> cur;
    enumerate_compositions(resolution, k, cur, [&](const std::vector<int>& t) {
        // conditional law t/resolution, converted to a density via the
        // conditional weights
        std::vector<double> z(k);
        for (int i = 0; i < k; ++i)
            z[i] = (static_cast<double>(t[i]) / resolution) / sp.cond_weight(atoms[i]);
        out.push_back(std::move(z));
    });

    bool has_reference = false;
    for (const auto& z : out) {
        bool all_one = true;
        for (double v : z)
            if (std::abs(v - 1.0) > 1e-12) { all_one = false; break; }
        if (all_one) { has_reference = true; break; }
    }
    if (!has_reference) out.push_back(std::vector<double>(k, 1.0));
    return out;
}

std::uint64_t scenario_grid_size(const FilteredSpace& sp, int resolution) {
    std::uint64_t total = 1;
    for (int b = 0; b < sp.block_count(); ++b) {
        std::uint64_t c =
            compositions_count(resolution, static_cast<int>(sp.block_atoms(b).size()));
        if (total > (1ull << 62) / std::max<std::uint64_t>(c, 1)) return 1ull << 62;
        total *= c;
    }
    return total;
}

std::vector<ScenarioDensity> scenario_grid(const FilteredSpace& sp, int resolution,
                                           std::uint64_t cap) {
    std::uint64_t total = scenario_grid_size(sp, resolution);
    if (total > cap)
        throw std::invalid_argument("scenario grid: " + std::to_string(total) +
                                    " combined lattice points, above the cap of " +
                                    std::to_string(cap));

    std::vector<std::vector<std::vector<double>>> per_block(sp.block_count());
    for (int b = 0; b < sp.block_count(); ++b)
        per_block[b] = block_scenario_grid(sp, b, resolution, cap);

    // cartesian product across blocks, lexicographic in block-local indices
    std::vector<ScenarioDensity> out;
    std::vector<std::size_t> idx(sp.block_count(), 0);
    while (true) {
        ScenarioDensity q{Rv(sp.atom_count())};
        for (int b = 0; b < sp.block_count(); ++b) {
            const auto& atoms = sp.block_atoms(b);
            for (std::size_t i = 0; i < atoms.size(); ++i) q.z[atoms[i]] = per_block[b][idx[b]][i];
        }
        out.push_back(std::move(q));
        int b = sp.block_count() - 1;
        while (b >= 0) {
            if (++idx[b] < per_block[b].size()) break;
            idx[b] = 0;
            --b;
        }
        if (b < 0) break;
    }
    return out;
}

}  // namespace riskdual
