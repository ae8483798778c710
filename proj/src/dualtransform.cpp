#include "riskdual/dualtransform.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "riskdual/parallel.hpp"
#include "riskdual/sampling.hpp"

namespace riskdual {

namespace {

struct Block {
    std::vector<int> atoms;
    std::vector<double> cw;
};

Block get_block(const FilteredSpace& sp, int b) {
    Block blk;
    blk.atoms = sp.block_atoms(b);
    blk.cw.resize(blk.atoms.size());
    for (std::size_t i = 0; i < blk.atoms.size(); ++i) blk.cw[i] = sp.cond_weight(blk.atoms[i]);
    return blk;
}

std::vector<double> slice(const Rv& x, const Block& blk) {
    std::vector<double> out(blk.atoms.size());
    for (std::size_t i = 0; i < blk.atoms.size(); ++i) out[i] = x[blk.atoms[i]];
    return out;
}

double blockwise_relative_entropy(const std::vector<double>& z, const Block& blk) {
    double s = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i)
        if (z[i] > 0.0) s += blk.cw[i] * z[i] * std::log(z[i]);
    return s;
}

bool is_reference_block(const std::vector<double>& z) {
    for (double v : z)
        if (std::abs(v - 1.0) > 1e-12) return false;
    return true;
}

// closed-form equality-constrained dual value where the catalog provides one
std::optional<double> analytic_dual_block(const RiskMeasure& rho, double level,
                                          const std::vector<double>& z, const Block& blk,
                                          int block) {
    const std::string& n = rho.name();
    if (n == "worst_case") return level;
    if (n == "expected_loss") return is_reference_block(z) ? level : -ext::inf;
    if (n == "entropic") {
        double gamma = rho.params().at("gamma");
        return level - blockwise_relative_entropy(z, blk) / gamma;
    }
    if (n == "pathological_infinite") {
        if (rho.known_upsilon() && rho.known_upsilon()->contains(block)) return ext::inf;
        return is_reference_block(z) ? level : -ext::inf;
    }
    return std::nullopt;
}

std::optional<double> analytic_conjugate_block(const RiskMeasure& rho,
                                               const std::vector<double>& z, const Block& blk,
                                               int block) {
    const std::string& n = rho.name();
    if (n == "worst_case") return 0.0;
    if (n == "expected_loss") return is_reference_block(z) ? 0.0 : ext::inf;
    if (n == "entropic") {
        double gamma = rho.params().at("gamma");
        return blockwise_relative_entropy(z, blk) / gamma;
    }
    if (n == "pathological_infinite") {
        if (rho.known_upsilon() && rho.known_upsilon()->contains(block)) return -ext::inf;
        return is_reference_block(z) ? 0.0 : ext::inf;
    }
    return std::nullopt;
}

struct BlockDual {
    double value = ext::inf;
    std::vector<double> xi;  // witness on the block's atoms
    DualMethod method = DualMethod::numeric;
    bool feasible = true;
    std::string note;
};

// equality constraint via the (k-1)-dimensional zero-mean subspace under the
// reweighted conditional law
BlockDual numeric_equality_block(const RiskMeasure& rho, int block, const Block& blk,
                                 double level, const std::vector<double>& z,
                                 const MinimizeOptions& mopts) {
    const int k = static_cast<int>(blk.atoms.size());
    BlockDual out;
    std::vector<double> d(k);
    int t = 0;
    for (int i = 0; i < k; ++i) {
        d[i] = blk.cw[i] * z[i];
        if (d[i] > d[t]) t = i;
    }
    if (k == 1) {
        out.xi = {-level};
        out.value = rho.evaluate_block(out.xi, blk.cw, block);
        out.note = "single atom";
        return out;
    }
    auto build_xi = [&](std::span<const double> coef) {
        std::vector<double> xi(k, -level);
        int c = 0;
        for (int i = 0; i < k; ++i) {
            if (i == t) continue;
            xi[i] += coef[c];
            xi[t] -= coef[c] * (d[i] / d[t]);
            ++c;
        }
        return xi;
    };
    Objective f = [&](std::span<const double> coef) {
        return rho.evaluate_block(build_xi(coef), blk.cw, block);
    };
    MinimizeResult res = minimize_pattern(f, k - 1, mopts);
    out.value = res.value;
    out.xi = build_xi(res.arg);
    if (res.unbounded && res.certificate) {
        out.note = "descent ray: " + res.certificate->note;
    } else if (res.budget_exhausted) {
        out.note = "eval budget exhausted";
    }
    return out;
}

// inequality constraint sum_i w_i xi_i >= level through a nonnegative slack
// plus the orthogonal complement of w
BlockDual numeric_inequality_block(const RiskMeasure& rho, int block, const Block& blk,
                                   double level, const std::vector<double>& w,
                                   const MinimizeOptions& mopts) {
    const int k = static_cast<int>(blk.atoms.size());
    BlockDual out;
    double ww = 0.0;
    for (double v : w) ww += v * v;

    if (ww < 1e-280) {
        // degenerate functional: the constraint reads 0 >= level
        if (level > 0.0) {
            out.feasible = false;
            out.value = ext::inf;
            out.note = "infeasible: zero functional against a positive level";
            out.xi.assign(k, 0.0);
            return out;
        }
        Objective f = [&](std::span<const double> xi) {
            return rho.evaluate_block(xi, blk.cw, block);
        };
        MinimizeResult res = minimize_pattern(f, k, mopts);
        out.value = res.value;
        out.xi = res.arg;
        if (res.unbounded && res.certificate) out.note = "descent ray: " + res.certificate->note;
        return out;
    }

    std::vector<double> xi0(k);
    for (int i = 0; i < k; ++i) xi0[i] = (level / ww) * w[i];
    // orthonormal basis of the complement of w
    std::vector<std::vector<double>> basis;
    {
        std::vector<double> wn(w);
        for (auto& v : wn) v /= std::sqrt(ww);
        basis.push_back(wn);
        for (int j = 0; j < k && static_cast<int>(basis.size()) < k; ++j) {
            std::vector<double> e(k, 0.0);
            e[j] = 1.0;
            for (const auto& bvec : basis) {
                double p = 0.0;
                for (int i = 0; i < k; ++i) p += e[i] * bvec[i];
                for (int i = 0; i < k; ++i) e[i] -= p * bvec[i];
            }
            double nrm = 0.0;
            for (double v : e) nrm += v * v;
            if (nrm > 1e-16) {
                nrm = std::sqrt(nrm);
                for (auto& v : e) v /= nrm;
                basis.push_back(std::move(e));
            }
        }
        basis.erase(basis.begin());  // keep only the complement directions
    }
    const int dim = 1 + static_cast<int>(basis.size());
    auto build_xi = [&](std::span<const double> par) {
        std::vector<double> xi = xi0;
        double slack = std::abs(par[0]);
        for (int i = 0; i < k; ++i) xi[i] += slack * w[i] / ww;
        for (std::size_t bidx = 0; bidx < basis.size(); ++bidx)
            for (int i = 0; i < k; ++i) xi[i] += par[1 + bidx] * basis[bidx][i];
        return xi;
    };
    Objective f = [&](std::span<const double> par) {
        return rho.evaluate_block(build_xi(par), blk.cw, block);
    };
    // seed the constant feasible anchor -level * 1 (it sits on the boundary)
    std::vector<std::vector<double>> extra;
    {
        std::vector<double> par(dim, 0.0);
        for (std::size_t bidx = 0; bidx < basis.size(); ++bidx) {
            double p = 0.0;
            for (int i = 0; i < k; ++i) p += (-level - xi0[i]) * basis[bidx][i];
            par[1 + bidx] = p;
        }
        extra.push_back(std::move(par));
    }
    MinimizeResult res = minimize_pattern(f, dim, mopts, extra);
    out.value = res.value;
    out.xi = build_xi(res.arg);
    if (res.unbounded && res.certificate) out.note = "descent ray: " + res.certificate->note;
    else if (res.budget_exhausted) out.note = "eval budget exhausted";
    return out;
}

void require_g_measurable(const Rv& y, const FilteredSpace& sp, const char* what) {
    if (!is_g_measurable(y, sp))
        throw std::invalid_argument(std::string(what) + " must be block-constant");
}

DualValue assemble(const FilteredSpace& sp, std::vector<BlockDual> blocks,
                   std::vector<DualMethod> methods) {
    DualValue dv;
    dv.value.resize(sp.block_count());
    dv.method = std::move(methods);
    dv.feasible.resize(sp.block_count());
    dv.note.resize(sp.block_count());
    dv.witness.assign(sp.atom_count(), 0.0);
    for (int b = 0; b < sp.block_count(); ++b) {
        dv.value[b] = blocks[b].value;
        dv.feasible[b] = blocks[b].feasible;
        dv.note[b] = blocks[b].note;
        const auto& atoms = sp.block_atoms(b);
        for (std::size_t i = 0; i < atoms.size() && i < blocks[b].xi.size(); ++i)
            dv.witness[atoms[i]] = blocks[b].xi[i];
    }
    return dv;
}

}  // namespace

bool has_analytic_dual(const RiskMeasure& rho) {
    const std::string& n = rho.name();
    return n == "worst_case" || n == "expected_loss" || n == "entropic" ||
           n == "pathological_infinite";
}

DualValue dual_value_general(const RiskMeasure& rho, const Rv& level, const Rv& mu,
                             const FilteredSpace& sp, const DualEvalOptions& opts) {
    require_g_measurable(level, sp, "level");
    validate_rv(mu, sp, /*require_finite=*/true);
    if (!rho.declares(Property::reg))
        throw std::invalid_argument("dual value needs a regular measure");
    std::vector<BlockDual> blocks(sp.block_count());
    std::vector<DualMethod> methods(sp.block_count(), DualMethod::numeric);
    for (int b = 0; b < sp.block_count(); ++b) {
        Block blk = get_block(sp, b);
        const int k = static_cast<int>(blk.atoms.size());
        std::vector<double> w(k);
        for (int i = 0; i < k; ++i) w[i] = blk.cw[i] * mu[blk.atoms[i]];
        MinimizeOptions mo = opts.opt;
        mo.seed = Rng(opts.seed).fork(1000 + b).fork(0x6d).next_u64();
        blocks[b] = numeric_inequality_block(rho, b, blk, level[blk.atoms[0]], w, mo);
    }
    return assemble(sp, std::move(blocks), std::move(methods));
}

DualValue dual_value(const RiskMeasure& rho, const Rv& level, const ScenarioDensity& q,
                     const FilteredSpace& sp, const DualEvalOptions& opts) {
    require_g_measurable(level, sp, "level");
    if (!rho.declares(Property::mon_down) || !rho.declares(Property::reg))
        throw std::invalid_argument(
            "equality-constrained dual value needs a monotone decreasing regular measure");
    if (!validate_scenario(q, sp))
        throw std::invalid_argument("dual value: invalid scenario density");

    std::vector<BlockDual> blocks(sp.block_count());
    std::vector<DualMethod> methods(sp.block_count(), DualMethod::numeric);
    for (int b = 0; b < sp.block_count(); ++b) {
        Block blk = get_block(sp, b);
        std::vector<double> z = slice(q.z, blk);
        double lv = level[blk.atoms[0]];
        if (opts.use_analytic) {
            if (auto v = analytic_dual_block(rho, lv, z, blk, b)) {
                BlockDual bd;
                bd.value = *v;
                bd.xi.assign(blk.atoms.size(), -lv);  // feasible anchor, not the argmin
                bd.method = DualMethod::analytic;
                blocks[b] = std::move(bd);
                methods[b] = DualMethod::analytic;
                continue;
            }
        }
        MinimizeOptions mo = opts.opt;
        mo.seed = Rng(opts.seed).fork(2000 + b).next_u64();
        blocks[b] = numeric_equality_block(rho, b, blk, lv, z, mo);
    }
    return assemble(sp, std::move(blocks), std::move(methods));
}

double dual_value_block(const RiskMeasure& rho, double level,
                        const std::vector<double>& z_block, const FilteredSpace& sp, int block,
                        const DualEvalOptions& opts, std::uint64_t seed_salt) {
    Block blk = get_block(sp, block);
    if (z_block.size() != blk.atoms.size())
        throw std::invalid_argument("dual_value_block: density size mismatch");
    if (opts.use_analytic) {
        if (auto v = analytic_dual_block(rho, level, z_block, blk, block)) return *v;
    }
    MinimizeOptions mo = opts.opt;
    mo.seed = Rng(opts.seed).fork(2000 + block).fork(seed_salt).next_u64();
    return numeric_equality_block(rho, block, blk, level, z_block, mo).value;
}

DualValue dual_value_ineq(const RiskMeasure& rho, const Rv& level, const ScenarioDensity& q,
                          const FilteredSpace& sp, DualEvalOptions opts) {
    if (!validate_scenario(q, sp))
        throw std::invalid_argument("dual value: invalid scenario density");
    opts.use_analytic = false;
    // E_Q[-xi | block] >= level reads sum cw z (-xi) >= level, so the general
    // form is called with the negated density
    Rv neg(sp.atom_count());
    for (int a = 0; a < sp.atom_count(); ++a) neg[a] = -q.z[a];
    return dual_value_general(rho, level, neg, sp, opts);
}

DualValue conjugate_penalty(const RiskMeasure& rho, const ScenarioDensity& q,
                            const FilteredSpace& sp, const DualEvalOptions& opts) {
    if (!validate_scenario(q, sp))
        throw std::invalid_argument("conjugate: invalid scenario density");
    std::vector<BlockDual> blocks(sp.block_count());
    std::vector<DualMethod> methods(sp.block_count(), DualMethod::numeric);
    for (int b = 0; b < sp.block_count(); ++b) {
        Block blk = get_block(sp, b);
        std::vector<double> z = slice(q.z, blk);
        if (opts.use_analytic) {
            if (auto v = analytic_conjugate_block(rho, z, blk, b)) {
                BlockDual bd;
                bd.value = *v;
                bd.xi.assign(blk.atoms.size(), 0.0);
                bd.method = DualMethod::analytic;
                blocks[b] = std::move(bd);
                methods[b] = DualMethod::analytic;
                continue;
            }
        }
        const int k = static_cast<int>(blk.atoms.size());
        Objective g = [&](std::span<const double> xi) {
            double lin = 0.0;
            for (int i = 0; i < k; ++i) lin -= blk.cw[i] * z[i] * xi[i];
            double r = rho.evaluate_block(xi, blk.cw, b);
            if (ext::is_pinf(r)) return -ext::inf;  // sup skips +inf risk
            if (ext::is_minf(r)) return ext::inf;
            return lin - r;
        };
        MinimizeOptions mo = opts.opt;
        mo.seed = Rng(opts.seed).fork(3000 + b).next_u64();
        MinimizeResult res = maximize_pattern(g, k, mo);
        BlockDual bd;
        bd.value = res.value;
        bd.xi = res.arg;
        if (res.unbounded && res.certificate) bd.note = "ascent ray: " + res.certificate->note;
        blocks[b] = std::move(bd);
    }
    return assemble(sp, std::move(blocks), std::move(methods));
}

DualSurface make_dual_surface(const RiskMeasure& rho) {
    DualSurface s;
    s.source = rho;
    s.analytic = has_analytic_dual(rho);
    s.tolerance = s.analytic ? 1e-8 : 1e-4;
    return s;
}

// ---- identity checks ----------------------------------------------------

namespace {

void detail(CheckReport& rep, const std::string& line) {
    if (rep.details.size() < 8) rep.details.push_back(line);
}

}  // namespace

CheckReport cas_identity_check(const RiskMeasure& rho, const Rv& x, const ScenarioDensity& q,
                               const FilteredSpace& sp, double tol, const DualEvalOptions& opts) {
    CheckReport rep;
    rep.check = "cas_identity";
    rep.measure = rho.name();
    if (!rho.declares(Property::cas) || !rho.declares(Property::mon_down) ||
        !rho.declares(Property::reg))
        throw std::invalid_argument("cas identity needs a cash-additive monotone regular measure");
    Rv level = q_conditional_expectation(q, x, sp);
    for (auto& v : level) v = -v;
    DualValue lhs = dual_value(rho, level, q, sp, opts);
    DualValue pen = conjugate_penalty(rho, q, sp, opts);
    rep.pass = true;
    rep.samples = sp.block_count();
    for (int b = 0; b < sp.block_count(); ++b) {
        double rhs = ext::sub(level[sp.block_atoms(b)[0]], pen.value[b]);
        double gap = ext::gap(lhs.value[b], rhs);
        rep.max_gap = std::max(rep.max_gap, gap);
        if (gap > tol) {
            rep.pass = false;
            detail(rep, "block " + std::to_string(b) + ": dual " + std::to_string(lhs.value[b]) +
                            " vs level-minus-penalty " + std::to_string(rhs));
        }
    }
    return rep;
}

CheckReport ddd_inequality_check(const RiskMeasure& rho, const Rv& x, const ScenarioDensity& q,
                                 const FilteredSpace& sp, double slack,
                                 const DualEvalOptions& opts) {
    CheckReport rep;
    rep.check = "conjugate_lower_bound";
    rep.measure = rho.name();
    Rv level = q_conditional_expectation(q, x, sp);
    for (auto& v : level) v = -v;
    DualValue lhs = dual_value(rho, level, q, sp, opts);
    DualValue pen = conjugate_penalty(rho, q, sp, opts);
    rep.pass = true;
    rep.samples = sp.block_count();
    for (int b = 0; b < sp.block_count(); ++b) {
        double lv = level[sp.block_atoms(b)[0]];
        double rhs = ext::sub(lv, pen.value[b]);
        if (ext::is_minf(lhs.value[b]) && !ext::is_pinf(pen.value[b])) {
            // reconcile: walk the certified descent ray; each point xi gives
            // the conjugate the lower bound lv - rho(xi), which must blow up
            Block blk = get_block(sp, b);
            std::vector<double> xi = slice(lhs.witness, blk);
            std::vector<double> z = slice(q.z, blk);
            double best = -ext::inf;
            for (int t = 0; t < 10; ++t) {
                double r = rho.evaluate_block(xi, blk.cw, b);
                double m = 0.0;
                for (std::size_t i = 0; i < xi.size(); ++i) m -= blk.cw[i] * z[i] * xi[i];
                if (ext::is_finite(r)) best = std::max(best, m - r);
                for (auto& v : xi) v *= 2.0;
            }
            if (best > pen.value[b]) {
                pen.value[b] = ext::inf;  // certified unbounded via the shared ray
                rhs = -ext::inf;
            }
        }
        bool ok = ext::le(rhs, lhs.value[b], slack);
        if (!ok) {
            rep.pass = false;
            detail(rep, "block " + std::to_string(b) + ": dual " + std::to_string(lhs.value[b]) +
                            " below bound " + std::to_string(rhs));
        }
        if (ext::is_finite(lhs.value[b]) && ext::is_finite(rhs))
            rep.max_gap = std::max(rep.max_gap, rhs - lhs.value[b]);
    }
    return rep;
}

CheckReport weak_duality_check(const RiskMeasure& rho, const Rv& x, const FilteredSpace& sp,
                               Rng rng, int scenario_count, double tol,
                               const DualEvalOptions& opts) {
    CheckReport rep;
    rep.check = "weak_duality";
    rep.measure = rho.name();
    Rv rx = rho.evaluate(x, sp);
    rep.pass = true;
    for (int s = 0; s < scenario_count; ++s) {
        Rng r = rng.fork(s);
        ScenarioDensity q = (s == 0) ? reference_density(sp) : random_density(sp, r);
        Rv level = q_conditional_expectation(q, x, sp);
        for (auto& v : level) v = -v;
        DualValue dv = dual_value(rho, level, q, sp, opts);
        for (int b = 0; b < sp.block_count(); ++b) {
            double rb = rx[sp.block_atoms(b)[0]];
            if (!ext::le(dv.value[b], rb, tol)) {
                rep.pass = false;
                detail(rep, "scenario " + std::to_string(s) + " block " + std::to_string(b) +
                                ": dual " + std::to_string(dv.value[b]) + " above measure " +
                                std::to_string(rb));
            }
            if (ext::is_finite(dv.value[b]) && ext::is_finite(rb))
                rep.max_gap = std::max(rep.max_gap, dv.value[b] - rb);
        }
    }
    rep.samples = scenario_count;
    return rep;
}

// ---- the representation supremum ---------------------------------------

double DualitySupResult::max_gap() const {
    double g = 0.0;
    for (double v : gap) g = std::max(g, v);
    return g;
}

namespace {

// largest resolution not exceeding `want` whose block lattice fits the cap
int adapt_resolution(const FilteredSpace& sp, int block, int want, std::uint64_t cap) {
    const int k = static_cast<int>(sp.block_atoms(block).size());
    for (int r = want; r > 1; --r) {
        // C(r + k - 1, k - 1)
        std::uint64_t count = 1;
        bool over = false;
        for (int i = 1; i <= k - 1; ++i) {
            count = count * static_cast<std::uint64_t>(r + i) / static_cast<std::uint64_t>(i);
            if (count > cap) { over = true; break; }
        }
        if (!over) return r;
    }
    return 1;
}

}  // namespace

DualitySupResult duality_sup(const RiskMeasure& rho, const Rv& x, const FilteredSpace& sp,
                             const SupSearchOptions& opts) {
    if (!rho.declares(Property::mon_down) || !rho.declares(Property::reg))
        throw std::invalid_argument("duality sup needs a monotone decreasing regular measure");
    validate_rv(x, sp, /*require_finite=*/true);

    DualitySupResult res;
    res.sup.assign(sp.block_count(), -ext::inf);
    res.rho_value = block_values(rho.evaluate(x, sp), sp);
    res.gap.assign(sp.block_count(), 0.0);
    res.argmax = reference_density(sp);
    res.candidates_tried.assign(sp.block_count(), 0);

    for (int b = 0; b < sp.block_count(); ++b) {
        Block blk = get_block(sp, b);
        const int k = static_cast<int>(blk.atoms.size());
        std::vector<double> xb = slice(x, blk);

        int r = adapt_resolution(sp, b, opts.grid_resolution, opts.per_block_cap);
        std::vector<std::vector<double>> cands = block_scenario_grid(sp, b, r, opts.per_block_cap + 2);
        if (r < opts.grid_resolution)
            res.notes.push_back("block " + std::to_string(b) + ": grid resolution reduced to " +
                                std::to_string(r));

        // catalog warm start: the exponentially tilted density maximizes the
        // entropic dual, so seed it alongside the lattice
        if (rho.name() == "entropic") {
            double gamma = rho.params().at("gamma");
            double top = -ext::inf;
            for (double v : xb) top = std::max(top, -gamma * v);
            double denom = 0.0;
            std::vector<double> tilt(k);
            for (int i = 0; i < k; ++i) {
                tilt[i] = std::exp(-gamma * xb[i] - top);
                denom += blk.cw[i] * tilt[i];
            }
            for (int i = 0; i < k; ++i) tilt[i] /= denom;
            cands.push_back(std::move(tilt));
        }

        auto value_at = [&](const std::vector<double>& z, std::uint64_t salt) {
            double lv = 0.0;
            for (int i = 0; i < k; ++i) lv -= blk.cw[i] * z[i] * xb[i];
            if (opts.eval.use_analytic) {
                if (auto v = analytic_dual_block(rho, lv, z, blk, b)) return *v;
            }
            MinimizeOptions mo = opts.eval.opt;
            mo.seed = Rng(opts.eval.seed).fork(4000 + b).fork(salt).next_u64();
            return numeric_equality_block(rho, b, blk, lv, z, mo).value;
        };

        std::vector<double> vals = parallel_map<double>(
            cands.size(), [&](std::size_t i) { return value_at(cands[i], i); }, opts.parallel);

        std::size_t best = 0;
        for (std::size_t i = 1; i < vals.size(); ++i)
            if (vals[i] > vals[best]) best = i;
        double best_val = vals[best];
        std::vector<double> best_z = cands[best];
        res.candidates_tried[b] = static_cast<int>(cands.size());

        // local ascent in the conditional-law simplex: move mass between two
        // coordinates, which preserves validity exactly
        if (k > 1 && opts.refine_budget > 0 && !ext::is_pinf(best_val)) {
            std::vector<double> d(k);
            for (int i = 0; i < k; ++i) d[i] = blk.cw[i] * best_z[i];
            double step = 0.25;
            int used = 0;
            std::uint64_t salt = 1u << 20;
            while (used < opts.refine_budget && step > 1e-9) {
                bool improved = false;
                for (int i = 0; i < k && !improved; ++i) {
                    for (int j = 0; j < k && !improved; ++j) {
                        if (i == j || d[j] < step) continue;
                        std::vector<double> d2 = d;
                        d2[i] += step;
                        d2[j] -= step;
                        std::vector<double> z2(k);
                        for (int l = 0; l < k; ++l) z2[l] = d2[l] / blk.cw[l];
                        double v = value_at(z2, ++salt);
                        ++used;
                        if (v > best_val + 1e-15) {
                            best_val = v;
                            best_z = std::move(z2);
                            d = std::move(d2);
                            improved = true;
                        }
                        if (used >= opts.refine_budget) break;
                    }
                }
                if (!improved) step *= 0.5;
            }
            if (used >= opts.refine_budget) {
                res.budget_exhausted = true;
                res.notes.push_back("block " + std::to_string(b) +
                                    ": ascent budget exhausted, best value kept");
            }
        }

        res.sup[b] = best_val;
        res.gap[b] = ext::gap(res.rho_value[b], best_val);
        for (int i = 0; i < k; ++i) res.argmax.z[blk.atoms[i]] = best_z[i];
    }
    return res;
}

// ---- sampled property battery ------------------------------------------

std::vector<CheckReport> dual_surface_properties(const RiskMeasure& rho, const FilteredSpace& sp,
                                                 Rng rng, int samples,
                                                 const DualEvalOptions& opts) {
    const double tol_id = has_analytic_dual(rho) ? 1e-8 : 1e-4;
    const double tol_num = 1e-4;
    std::vector<CheckReport> out;

    auto fresh = [&](const std::string& name) {
        CheckReport r;
        r.check = name;
        r.measure = rho.name();
        r.pass = true;
        r.samples = samples;
        return r;
    };

    // (monotone in the level)
    {
        CheckReport rep = fresh("level_monotone");
        for (int s = 0; s < samples; ++s) {
            Rng r = rng.fork(s);
            ScenarioDensity q = random_density(sp, r);
            Rv y1 = random_g_measurable(r, sp, -3.0, 3.0);
            Rv y2 = bump_g_measurable(r, y1, sp, 0.0, 2.0);
            DualValue v1 = dual_value(rho, y1, q, sp, opts);
            DualValue v2 = dual_value(rho, y2, q, sp, opts);
            for (int b = 0; b < sp.block_count(); ++b) {
                if (!ext::le(v1.value[b], v2.value[b], tol_num)) {
                    rep.pass = false;
                    detail(rep, "sample " + std::to_string(s) + " block " + std::to_string(b));
                }
            }
        }
        out.push_back(rep);
    }

    // (positive scaling of the functional)
    {
        CheckReport rep = fresh("scaling_invariance");
        for (int s = 0; s < samples; ++s) {
            Rng r = rng.fork(1000 + s);
            ScenarioDensity q = random_density(sp, r);
            Rv x = random_rv(r, sp);
            Rv lam = random_g_measurable(r, sp, 0.3, 2.5);
            Rv mu(sp.atom_count()), mu_scaled(sp.atom_count());
            for (int a = 0; a < sp.atom_count(); ++a) {
                mu[a] = q.z[a];
                mu_scaled[a] = lam[a] * q.z[a];
            }
            Rv level = conditional_expectation(
                [&] {
                    Rv zx(sp.atom_count());
                    for (int a = 0; a < sp.atom_count(); ++a) zx[a] = mu[a] * x[a];
                    return zx;
                }(),
                sp);
            Rv level_scaled(sp.atom_count());
            for (int a = 0; a < sp.atom_count(); ++a) level_scaled[a] = lam[a] * level[a];
            DualValue v1 = dual_value_general(rho, level, mu, sp, opts);
            DualValue v2 = dual_value_general(rho, level_scaled, mu_scaled, sp, opts);
            for (int b = 0; b < sp.block_count(); ++b) {
                double g = ext::gap(v1.value[b], v2.value[b]);
                rep.max_gap = std::max(rep.max_gap, g);
                if (g > tol_num) {
                    rep.pass = false;
                    detail(rep, "sample " + std::to_string(s) + " block " + std::to_string(b));
                }
            }
        }
        out.push_back(rep);
    }

    // (level locality)
    {
        CheckReport rep = fresh("level_locality");
        for (int s = 0; s < samples; ++s) {
            Rng r = rng.fork(2000 + s);
            ScenarioDensity q = random_density(sp, r);
            Rv y = random_g_measurable(r, sp, -3.0, 3.0);
            GSet a = random_gset(r, sp);
            Rv ya = restrict_to(y, a, sp);
            DualValue v1 = dual_value(rho, y, q, sp, opts);
            DualValue v2 = dual_value(rho, ya, q, sp, opts);
            for (int b = 0; b < sp.block_count(); ++b) {
                if (!a.contains(b)) continue;
                double g = ext::gap(v1.value[b], v2.value[b]);
                rep.max_gap = std::max(rep.max_gap, g);
                if (g > tol_id) {
                    rep.pass = false;
                    detail(rep, "sample " + std::to_string(s) + " block " + std::to_string(b));
                }
            }
        }
        out.push_back(rep);
    }

    // (lattice of levels)
    {
        CheckReport rep = fresh("level_lattice");
        for (int s = 0; s < samples; ++s) {
            Rng r = rng.fork(3000 + s);
            ScenarioDensity q = random_density(sp, r);
            Rv x1 = random_rv(r, sp), x2 = random_rv(r, sp);
            Rv m1 = q_conditional_expectation(q, x1, sp), m2 = q_conditional_expectation(q, x2, sp);
            for (auto& v : m1) v = -v;
            for (auto& v : m2) v = -v;
            Rv lo(sp.atom_count()), hi(sp.atom_count());
            for (int a = 0; a < sp.atom_count(); ++a) {
                lo[a] = std::min(m1[a], m2[a]);
                hi[a] = std::max(m1[a], m2[a]);
            }
            DualValue v1 = dual_value(rho, m1, q, sp, opts);
            DualValue v2 = dual_value(rho, m2, q, sp, opts);
            DualValue vlo = dual_value(rho, lo, q, sp, opts);
            DualValue vhi = dual_value(rho, hi, q, sp, opts);
            for (int b = 0; b < sp.block_count(); ++b) {
                double wmin = std::min(v1.value[b], v2.value[b]);
                double wmax = std::max(v1.value[b], v2.value[b]);
                double g1 = ext::gap(vlo.value[b], wmin);
                double g2 = ext::gap(vhi.value[b], wmax);
                rep.max_gap = std::max({rep.max_gap, g1, g2});
                if (g1 > tol_id || g2 > tol_id) {
                    rep.pass = false;
                    detail(rep, "sample " + std::to_string(s) + " block " + std::to_string(b));
                }
            }
        }
        out.push_back(rep);
    }

    // (quasi-affinity in the position)
    {
        CheckReport rep = fresh("position_quasi_affine");
        for (int s = 0; s < samples; ++s) {
            Rng r = rng.fork(4000 + s);
            ScenarioDensity q = random_density(sp, r);
            Rv x1 = random_rv(r, sp), x2 = random_rv(r, sp);
            Rv lam = random_mixing(r, sp);
            Rv mix(sp.atom_count());
            for (int a = 0; a < sp.atom_count(); ++a)
                mix[a] = lam[a] * x1[a] + (1.0 - lam[a]) * x2[a];
            auto lvl = [&](const Rv& v) {
                Rv m = q_conditional_expectation(q, v, sp);
                for (auto& u : m) u = -u;
                return m;
            };
            DualValue v1 = dual_value(rho, lvl(x1), q, sp, opts);
            DualValue v2 = dual_value(rho, lvl(x2), q, sp, opts);
            DualValue vm = dual_value(rho, lvl(mix), q, sp, opts);
            for (int b = 0; b < sp.block_count(); ++b) {
                double wmin = std::min(v1.value[b], v2.value[b]);
                double wmax = std::max(v1.value[b], v2.value[b]);
                if (!ext::le(wmin, vm.value[b], tol_id) || !ext::le(vm.value[b], wmax, tol_id)) {
                    rep.pass = false;
                    detail(rep, "sample " + std::to_string(s) + " block " + std::to_string(b));
                }
            }
        }
        out.push_back(rep);
    }

    // (the infimum over levels does not depend on the scenario)
    {
        CheckReport rep = fresh("scenario_free_infimum");
        // sweep levels downward once per scenario; per block, a linear escape
        // means an unbounded infimum and a stable tail means a plateau
        auto classify_all = [&](const ScenarioDensity& q) {
            std::vector<std::vector<double>> sweep;
            for (int j = 3; j <= 10; ++j) {
                Rv y(sp.atom_count(), -std::pow(2.0, j));
                sweep.push_back(dual_value(rho, y, q, sp, opts).value);
            }
            std::vector<double> cls(sp.block_count());
            for (int b = 0; b < sp.block_count(); ++b) {
                double verdict = sweep.back()[b];
                bool settled = false;
                for (std::size_t j = 0; j < sweep.size() && !settled; ++j) {
                    double v = sweep[j][b];
                    if (ext::is_minf(v)) { verdict = -ext::inf; settled = true; }
                    else if (j + 1 == sweep.size() && ext::is_pinf(v)) verdict = ext::inf;
                    else if (j > 0 && ext::is_finite(v) && ext::is_finite(sweep[j - 1][b]) &&
                             std::abs(v - sweep[j - 1][b]) < 1e-7) {
                        verdict = v;
                        settled = true;
                    }
                }
                if (!settled && ext::is_finite(verdict) && verdict <= -100.0) verdict = -ext::inf;
                cls[b] = verdict;
            }
            return cls;
        };
        for (int s = 0; s < samples; ++s) {
            Rng r = rng.fork(5000 + s);
            ScenarioDensity q1 = random_density(sp, r);
            ScenarioDensity q2 = random_density(sp, r);
            std::vector<double> i1 = classify_all(q1), i2 = classify_all(q2);
            for (int b = 0; b < sp.block_count(); ++b) {
                double g = ext::gap(i1[b], i2[b]);
                rep.max_gap = std::max(rep.max_gap, g);
                if (g > 1e-4) {
                    rep.pass = false;
                    detail(rep, "sample " + std::to_string(s) + " block " + std::to_string(b));
                }
            }
        }
        out.push_back(rep);
    }

    // (downward directedness and the witness under the cut level)
    {
        CheckReport rep = fresh("downward_directed_witness");
        int n = std::max(4, samples / 4);
        for (int s = 0; s < n; ++s) {
            Rng r = rng.fork(6000 + s);
            ScenarioDensity q = random_density(sp, r);
            Rv xi1 = random_rv(r, sp), xi2 = random_rv(r, sp);
            Rv m1 = q_conditional_expectation(q, xi1, sp), m2 = q_conditional_expectation(q, xi2, sp);
            Rv y(sp.atom_count());
            for (int a = 0; a < sp.atom_count(); ++a) y[a] = std::min(-m1[a], -m2[a]);
            y = bump_g_measurable(r, y, sp, -0.5, 0.0);
            Rv neg(sp.atom_count());
            for (int a = 0; a < sp.atom_count(); ++a) neg[a] = -q.z[a];
            DualValue dv = dual_value_general(rho, y, neg, sp, opts);
            Rv r1 = rho.evaluate(xi1, sp), r2 = rho.evaluate(xi2, sp);
            for (int b = 0; b < sp.block_count(); ++b) {
                int a0 = sp.block_atoms(b)[0];
                double cap = std::min(r1[a0], r2[a0]);
                if (!ext::le(dv.value[b], cap, tol_num)) {
                    rep.pass = false;
                    detail(rep, "incumbent above both feasible risks, sample " + std::to_string(s));
                }
                // witness: strictly below any alpha above the value
                if (ext::is_finite(dv.value[b])) {
                    double alpha = dv.value[b] + 0.01;
                    Block blk = get_block(sp, b);
                    std::vector<double> xi = slice(dv.witness, blk);
                    double rw = rho.evaluate_block(xi, blk.cw, b);
                    double mw = 0.0;
                    for (std::size_t i = 0; i < xi.size(); ++i)
                        mw -= blk.cw[i] * q.z[blk.atoms[i]] * xi[i];
                    if (!(rw < alpha) || mw < y[a0] - 1e-6) {
                        rep.pass = false;
                        detail(rep, "witness fails, sample " + std::to_string(s) + " block " +
                                        std::to_string(b));
                    }
                }
            }
        }
        rep.samples = n;
        out.push_back(rep);
    }

    return out;
}

}  // namespace riskdual
