#include "riskdual/separation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

namespace riskdual {

namespace {

// values of x on the atoms of one block
std::vector<double> slice(const Rv& x, const FilteredSpace& sp, int block) {
    const auto& atoms = sp.block_atoms(block);
    std::vector<double> out(atoms.size());
    for (std::size_t i = 0; i < atoms.size(); ++i) out[i] = x[atoms[i]];
    return out;
}

// conditional weights of the block's atoms
std::vector<double> cweights(const FilteredSpace& sp, int block) {
    const auto& atoms = sp.block_atoms(block);
    std::vector<double> out(atoms.size());
    for (std::size_t i = 0; i < atoms.size(); ++i) out[i] = sp.cond_weight(atoms[i]);
    return out;
}

double cdot(const std::vector<double>& c, const std::vector<double>& a,
            const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += c[i] * a[i] * b[i];
    return s;
}

// modified Gram-Schmidt in the c-weighted inner product; returns the
// orthonormal basis actually kept (rank = size)
std::vector<std::vector<double>> orthonormalize(const std::vector<std::vector<double>>& dirs,
                                                const std::vector<double>& c) {
    std::vector<std::vector<double>> basis;
    for (auto v : dirs) {
        for (const auto& b : basis) {
            double p = cdot(c, v, b);
            for (std::size_t i = 0; i < v.size(); ++i) v[i] -= p * b[i];
        }
        double nrm = std::sqrt(std::max(cdot(c, v, v), 0.0));
        if (nrm > 1e-9) {
            for (auto& vi : v) vi /= nrm;
            basis.push_back(std::move(v));
        }
    }
    return basis;
}

std::vector<double> project_residual(std::vector<double> v,
                                     const std::vector<std::vector<double>>& basis,
                                     const std::vector<double>& c) {
    for (const auto& b : basis) {
        double p = cdot(c, v, b);
        for (std::size_t i = 0; i < v.size(); ++i) v[i] -= p * b[i];
    }
    return v;
}

}  // namespace

std::string hull_mode_name(HullMode m) {
    switch (m) {
        case HullMode::convex: return "convex";
        case HullMode::cone: return "cone";
        case HullMode::affine: return "affine";
        case HullMode::linear: return "linear";
        case HullMode::concat: return "concat";
    }
    return "?";
}

std::optional<HullMode> parse_hull_mode(const std::string& s) {
    if (s == "convex") return HullMode::convex;
    if (s == "cone") return HullMode::cone;
    if (s == "affine") return HullMode::affine;
    if (s == "linear") return HullMode::linear;
    if (s == "concat") return HullMode::concat;
    return std::nullopt;
}

bool block_hull_member(const Rv& x, const HullSet& c, const FilteredSpace& sp, int block,
                       double tol) {
    if (c.generators.empty()) throw std::invalid_argument("hull: needs at least one generator");
    const auto& atoms = sp.block_atoms(block);
    const int k = static_cast<int>(atoms.size());
    std::vector<double> xb = slice(x, sp, block);

    if (c.mode == HullMode::concat) {
        for (const auto& g : c.generators) {
            bool match = true;
            for (int i = 0; i < k; ++i)
                if (std::abs(g[atoms[i]] - xb[i]) > tol) { match = false; break; }
            if (match) return true;
        }
        return false;
    }

    if (c.mode == HullMode::linear || c.mode == HullMode::affine) {
        std::vector<double> cw = cweights(sp, block);
        std::vector<std::vector<double>> dirs;
        std::vector<double> target = xb;
        if (c.mode == HullMode::linear) {
            for (const auto& g : c.generators) dirs.push_back(slice(g, sp, block));
        } else {
            std::vector<double> g0 = slice(c.generators[0], sp, block);
            for (std::size_t i = 1; i < c.generators.size(); ++i) {
                auto gi = slice(c.generators[i], sp, block);
                for (int j = 0; j < k; ++j) gi[j] -= g0[j];
                dirs.push_back(std::move(gi));
            }
            for (int j = 0; j < k; ++j) target[j] -= g0[j];
        }
        auto basis = orthonormalize(dirs, cw);
        auto resid = project_residual(target, basis, cw);
        return std::sqrt(std::max(cdot(cw, resid, resid), 0.0)) <= tol;
    }

    // convex / cone: LP feasibility in the combination coefficients
    const int ng = static_cast<int>(c.generators.size());
    const int nr = (c.mode == HullMode::convex) ? static_cast<int>(c.rays.size()) : 0;
    LinearProgram lp(ng + nr);
    for (int j = 0; j < ng + nr; ++j) lp.nonnegative[j] = true;
    for (int i = 0; i < k; ++i) {
        std::vector<double> row(ng + nr, 0.0);
        for (int j = 0; j < ng; ++j) row[j] = c.generators[j][atoms[i]];
        for (int j = 0; j < nr; ++j) row[ng + j] = c.rays[j][atoms[i]];
        lp.add_row(std::move(row), LpRel::eq, xb[i]);
    }
    if (c.mode == HullMode::convex) {
        std::vector<double> row(ng + nr, 0.0);
        for (int j = 0; j < ng; ++j) row[j] = 1.0;
        lp.add_row(std::move(row), LpRel::eq, 1.0);
    }
    return solve_lp(lp).status == LpStatus::optimal;
}

TrivialComponent trivial_component(const HullSet& c, const FilteredSpace& sp) {
    if (c.generators.empty()) throw std::invalid_argument("hull: needs at least one generator");
    TrivialComponent tc;
    tc.a_c = GSet::empty();

    double radius = 1.0;
    for (const auto& g : c.generators)
        for (double v : g) radius = std::max(radius, std::abs(v));
    const double probe_mag = 2.0 * radius + 1.0;

    for (int b = 0; b < sp.block_count(); ++b) {
        const auto& atoms = sp.block_atoms(b);
        const int k = static_cast<int>(atoms.size());
        bool spans = false;
        if (c.mode == HullMode::linear || c.mode == HullMode::affine) {
            std::vector<double> cw = cweights(sp, b);
            std::vector<std::vector<double>> dirs;
            if (c.mode == HullMode::linear) {
                for (const auto& g : c.generators) dirs.push_back(slice(g, sp, b));
            } else {
                std::vector<double> g0 = slice(c.generators[0], sp, b);
                for (std::size_t i = 1; i < c.generators.size(); ++i) {
                    auto gi = slice(c.generators[i], sp, b);
                    for (int j = 0; j < k; ++j) gi[j] -= g0[j];
                    dirs.push_back(std::move(gi));
                }
            }
            spans = static_cast<int>(orthonormalize(dirs, cw).size()) == k;
        } else {
            // probe the +-B e_j targets through the membership LP
            tc.probe_based = true;
            spans = true;
            for (int i = 0; i < k && spans; ++i) {
                for (int sgn = -1; sgn <= 1 && spans; sgn += 2) {
                    Rv target(sp.atom_count(), 0.0);
                    target[atoms[i]] = sgn * probe_mag;
                    if (!block_hull_member(target, c, sp, b)) spans = false;
                }
            }
        }
        if (spans) tc.a_c = tc.a_c.unite(GSet::single(b));
    }
    tc.d_c = tc.a_c.complement(sp.block_count());
    return tc;
}

OutsideReport is_outside(const Rv& x, const HullSet& c, const FilteredSpace& sp) {
    validate_rv(x, sp, /*require_finite=*/true);
    OutsideReport rep;
    rep.tc = trivial_component(c, sp);
    rep.outside_everywhere = true;
    for (int b = 0; b < sp.block_count(); ++b) {
        if (!rep.tc.d_c.contains(b)) continue;
        OutsideVerdict v;
        v.block = b;
        v.outside = !block_hull_member(x, c, sp, b);
        v.certificate = v.outside ? "no combination matches x on the block"
                                  : "hull contains x on the block";
        if (!v.outside) rep.outside_everywhere = false;
        rep.verdicts.push_back(std::move(v));
    }
    if (rep.tc.d_c.empty_set()) rep.outside_everywhere = false;
    return rep;
}

SeparationResult separate(const Rv& x, const HullSet& c, const FilteredSpace& sp) {
    validate_rv(x, sp, /*require_finite=*/true);
    SeparationResult res;
    res.z.assign(sp.atom_count(), 0.0);
    res.margins.assign(sp.block_count(), 0.0);
    TrivialComponent tc = trivial_component(c, sp);
    res.d_c = tc.d_c;
    res.ok = !tc.d_c.empty_set();

    for (int b = 0; b < sp.block_count(); ++b) {
        if (!tc.d_c.contains(b)) continue;
        const auto& atoms = sp.block_atoms(b);
        const int k = static_cast<int>(atoms.size());
        std::vector<double> cw = cweights(sp, b);
        std::vector<double> xb = slice(x, sp, b);
        std::vector<double> zb(k, 0.0);

        if (c.mode == HullMode::linear || c.mode == HullMode::affine) {
            // residual of the projection separates flat hulls directly
            std::vector<std::vector<double>> dirs;
            std::vector<double> target = xb;
            if (c.mode == HullMode::linear) {
                for (const auto& g : c.generators) dirs.push_back(slice(g, sp, b));
            } else {
                std::vector<double> g0 = slice(c.generators[0], sp, b);
                for (std::size_t i = 1; i < c.generators.size(); ++i) {
                    auto gi = slice(c.generators[i], sp, b);
                    for (int j = 0; j < k; ++j) gi[j] -= g0[j];
                    dirs.push_back(std::move(gi));
                }
                for (int j = 0; j < k; ++j) target[j] -= g0[j];
            }
            auto basis = orthonormalize(dirs, cw);
            zb = project_residual(target, basis, cw);
        } else {
            // LP: maximize the margin over box-normalized functionals
            const int ng = static_cast<int>(c.generators.size());
            LinearProgram lp(k + 1);  // z_1..z_k, delta
            lp.maximize = true;
            lp.objective[k] = 1.0;
            if (c.mode == HullMode::cone) {
                // sup over the cone is +inf unless <z,g> <= 0 for all g; the
                // sup is then 0 (at the origin) and the margin is <z,x>
                for (int j = 0; j < ng; ++j) {
                    std::vector<double> crow(k + 1, 0.0);
                    for (int i = 0; i < k; ++i) crow[i] = cw[i] * c.generators[j][atoms[i]];
                    lp.add_row(std::move(crow), LpRel::le, 0.0);
                }
                std::vector<double> xrow(k + 1, 0.0);
                for (int i = 0; i < k; ++i) xrow[i] = cw[i] * xb[i];
                xrow[k] = -1.0;
                lp.add_row(std::move(xrow), LpRel::ge, 0.0);
            } else {
                for (int j = 0; j < ng; ++j) {
                    std::vector<double> row(k + 1, 0.0);
                    const auto& g = c.generators[j];
                    for (int i = 0; i < k; ++i) row[i] = cw[i] * (xb[i] - g[atoms[i]]);
                    row[k] = -1.0;
                    lp.add_row(std::move(row), LpRel::ge, 0.0);
                }
            }
            for (const auto& r : c.rays) {
                std::vector<double> row(k + 1, 0.0);
                for (int i = 0; i < k; ++i) row[i] = cw[i] * r[atoms[i]];
                lp.add_row(std::move(row), LpRel::le, 0.0);
            }
            for (int i = 0; i < k; ++i) {
                std::vector<double> lo(k + 1, 0.0), hi(k + 1, 0.0);
                hi[i] = 1.0;
                lp.add_row(std::move(hi), LpRel::le, 1.0);
                lo[i] = -1.0;
                lp.add_row(std::move(lo), LpRel::le, 1.0);
            }
            std::vector<double> dbound(k + 1, 0.0);
            dbound[k] = 1.0;
            lp.add_row(std::move(dbound), LpRel::le, 1e6);
            LpResult sol = solve_lp(lp);
            if (sol.status == LpStatus::optimal)
                for (int i = 0; i < k; ++i) zb[i] = sol.x[i];
        }

        // recompute the margin independently of the solve
        double zx = cdot(cw, zb, xb);
        double worst = -std::numeric_limits<double>::infinity();
        for (const auto& g : c.generators) worst = std::max(worst, cdot(cw, zb, slice(g, sp, b)));
        if (c.mode == HullMode::cone) worst = std::max(worst, 0.0);
        double margin = zx - worst;
        res.margins[b] = margin;
        for (int i = 0; i < k; ++i) res.z[atoms[i]] = zb[i];
        if (!(margin > 0.0)) {
            res.ok = false;
            res.boundary_blocks.push_back(b);
        }
    }
    return res;
}

std::vector<Rv> concatenation_hull(const std::vector<Rv>& generators, const FilteredSpace& sp,
                                   std::uint64_t cap) {
    if (generators.empty()) throw std::invalid_argument("concatenation hull: empty generator list");
    const int m = sp.block_count();
    const std::uint64_t ng = generators.size();
    std::uint64_t count = 1;
    for (int b = 0; b < m; ++b) {
        if (count > cap / ng + 1) break;
        count *= ng;
    }
    if (count > cap)
        throw std::invalid_argument("concatenation hull: " + std::to_string(count) +
                                    " pastings exceed the cap of " + std::to_string(cap));

    std::set<Rv> seen;
    std::vector<Rv> out;
    std::vector<std::size_t> pick(m, 0);
    while (true) {
        Rv v(sp.atom_count());
        for (int b = 0; b < m; ++b)
            for (int a : sp.block_atoms(b)) v[a] = generators[pick[b]][a];
        if (seen.insert(v).second) out.push_back(v);
        int b = m - 1;
        while (b >= 0) {
            if (++pick[b] < ng) break;
            pick[b] = 0;
            --b;
        }
        if (b < 0) break;
    }
    return out;
}

}  // namespace riskdual
