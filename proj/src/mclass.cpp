#include "riskdual/mclass.hpp"

#include <algorithm>
#include <cmath>

#include "riskdual/lp.hpp"
#include "riskdual/sampling.hpp"

namespace riskdual {

double DualCandidate::value_on_block(const Rv& level, const ScenarioDensity& q,
                                     const FilteredSpace& sp, int block) const {
    if (eval_block) {
        const auto& atoms = sp.block_atoms(block);
        std::vector<double> zb(atoms.size());
        for (std::size_t i = 0; i < atoms.size(); ++i) zb[i] = q.z[atoms[i]];
        return eval_block(level[atoms[0]], zb, sp, block);
    }
    return eval(level, q, sp)[block];
}

DualCandidate candidate_from_measure(const RiskMeasure& rho, const DualEvalOptions& opts) {
    DualCandidate k;
    k.label = "dual(" + rho.name() + ")";
    k.eval = [rho, opts](const Rv& level, const ScenarioDensity& q, const FilteredSpace& sp) {
        return dual_value(rho, level, q, sp, opts).value;
    };
    k.eval_block = [rho, opts](double level, const std::vector<double>& zb,
                               const FilteredSpace& sp, int block) {
        return dual_value_block(rho, level, zb, sp, block, opts);
    };
    return k;
}

bool KkReport::all_required_pass() const {
    for (const auto& it : items)
        if (it.item != "evenly_quasiconcave_search" && !it.pass) return false;
    return true;
}

namespace {

void note(KkItemReport& rep, const std::string& line) {
    if (rep.details.size() < 8) rep.details.push_back(line);
}

// downward level sweep with the same plateau-vs-escape classification used
// for the dual surface battery, all blocks from one sweep
std::vector<double> classify_infimum_all(const DualCandidate& k, const ScenarioDensity& q,
                                         const FilteredSpace& sp) {
    std::vector<std::vector<double>> sweep;
    for (int j = 3; j <= 10; ++j) {
        Rv level(sp.atom_count(), -std::pow(2.0, j));
        sweep.push_back(k.eval(level, q, sp));
    }
    std::vector<double> cls(sp.block_count());
    for (int b = 0; b < sp.block_count(); ++b) {
        double verdict = sweep.back()[b];
        bool settled = false;
        bool any_finite = false;
        for (std::size_t j = 0; j < sweep.size() && !settled; ++j) {
            double v = sweep[j][b];
            if (ext::is_finite(v)) any_finite = true;
            if (ext::is_minf(v)) {
                verdict = -ext::inf;
                settled = true;
            } else if (j > 0 && ext::is_finite(v) && ext::is_finite(sweep[j - 1][b]) &&
                       std::abs(v - sweep[j - 1][b]) < 1e-7) {
                verdict = v;
                settled = true;
            }
        }
        if (!settled) {
            if (!any_finite) verdict = ext::inf;  // +inf plateau throughout
            else if (ext::is_finite(verdict) && verdict <= -100.0) verdict = -ext::inf;
        }
        cls[b] = verdict;
    }
    return cls;
}

}  // namespace

KkReport audit_kk(const DualCandidate& k, const FilteredSpace& sp, Rng rng,
                  const KkAuditOptions& opts) {
    KkReport rep;
    rep.label = k.label;

    // (i) increasing in the level
    {
        KkItemReport item;
        item.item = "level_monotone";
        item.pass = true;
        item.samples = opts.samples;
        for (int s = 0; s < opts.samples; ++s) {
            Rng r = rng.fork(s);
            ScenarioDensity q = random_density(sp, r);
            Rv y1 = random_g_measurable(r, sp, -3.0, 3.0);
            Rv y2 = bump_g_measurable(r, y1, sp, 0.0, 2.0);
            std::vector<double> v1 = k.eval(y1, q, sp), v2 = k.eval(y2, q, sp);
            for (int b = 0; b < sp.block_count(); ++b)
                if (!ext::le(v1[b], v2[b], opts.tol)) {
                    item.pass = false;
                    note(item, "sample " + std::to_string(s) + " block " + std::to_string(b));
                }
        }
        rep.items.push_back(std::move(item));
    }

    // (ii) locality in the level
    {
        KkItemReport item;
        item.item = "level_locality";
        item.pass = true;
        item.samples = opts.samples;
        for (int s = 0; s < opts.samples; ++s) {
            Rng r = rng.fork(1000 + s);
            ScenarioDensity q = random_density(sp, r);
            Rv y = random_g_measurable(r, sp, -3.0, 3.0);
            GSet a = random_gset(r, sp);
            std::vector<double> v1 = k.eval(y, q, sp);
            std::vector<double> v2 = k.eval(restrict_to(y, a, sp), q, sp);
            for (int b = 0; b < sp.block_count(); ++b)
                if (a.contains(b) && ext::gap(v1[b], v2[b]) > opts.tol) {
                    item.pass = false;
                    note(item, "sample " + std::to_string(s) + " block " + std::to_string(b));
                }
        }
        rep.items.push_back(std::move(item));
    }

    // (iii) the infimum over levels is scenario-free
    {
        KkItemReport item;
        item.item = "scenario_free_infimum";
        item.pass = true;
        item.samples = opts.samples;
        for (int s = 0; s < opts.samples; ++s) {
            Rng r = rng.fork(2000 + s);
            ScenarioDensity q1 = random_density(sp, r);
            ScenarioDensity q2 = random_density(sp, r);
            std::vector<double> i1 = classify_infimum_all(k, q1, sp);
            std::vector<double> i2 = classify_infimum_all(k, q2, sp);
            for (int b = 0; b < sp.block_count(); ++b) {
                if (ext::gap(i1[b], i2[b]) > 1e-4) {
                    item.pass = false;
                    note(item, "sample " + std::to_string(s) + " block " + std::to_string(b));
                }
            }
        }
        rep.items.push_back(std::move(item));
    }

    // (v) upward directed along scenarios
    {
        KkItemReport item;
        item.item = "upward_directed";
        item.pass = true;
        item.samples = opts.samples;
        for (int s = 0; s < opts.samples; ++s) {
            Rng r = rng.fork(3000 + s);
            ScenarioDensity q1 = random_density(sp, r);
            ScenarioDensity q2 = random_density(sp, r);
            Rv x = random_rv(r, sp);
            auto lvl = [&](const ScenarioDensity& q) {
                Rv m = q_conditional_expectation(q, x, sp);
                for (auto& v : m) v = -v;
                return m;
            };
            std::vector<double> v1 = k.eval(lvl(q1), q1, sp);
            std::vector<double> v2 = k.eval(lvl(q2), q2, sp);
            GSet f = GSet::empty();
            for (int b = 0; b < sp.block_count(); ++b)
                if (!ext::le(v1[b], v2[b], 0.0)) f = f.unite(GSet::single(b));
            ScenarioDensity pasted = paste_scenarios(q1, q2, f, sp);
            std::vector<double> vp = k.eval(lvl(pasted), pasted, sp);
            for (int b = 0; b < sp.block_count(); ++b) {
                double want = std::max(v1[b], v2[b]);
                if (!ext::le(want, vp[b], opts.tol)) {
                    item.pass = false;
                    note(item, "sample " + std::to_string(s) + " block " + std::to_string(b));
                }
            }
        }
        rep.items.push_back(std::move(item));
    }

    // (vi) locality in the scenario
    {
        KkItemReport item;
        item.item = "scenario_locality";
        item.pass = true;
        item.samples = opts.samples;
        for (int s = 0; s < opts.samples; ++s) {
            Rng r = rng.fork(4000 + s);
            ScenarioDensity q1 = random_density(sp, r);
            ScenarioDensity qr = random_density(sp, r);
            GSet a = random_gset(r, sp);
            ScenarioDensity q2 = paste_scenarios(q1, qr, a, sp);
            Rv y = random_g_measurable(r, sp, -3.0, 3.0);
            std::vector<double> v1 = k.eval(y, q1, sp);
            std::vector<double> v2 = k.eval(y, q2, sp);
            for (int b = 0; b < sp.block_count(); ++b)
                if (a.contains(b) && ext::gap(v1[b], v2[b]) > opts.tol) {
                    item.pass = false;
                    note(item, "sample " + std::to_string(s) + " block " + std::to_string(b));
                }
        }
        rep.items.push_back(std::move(item));
    }

    // (iv) evenly quasiconcave, audited as a constructive separation search:
    // a strict separator must exist against everything at-or-above the cut
    {
        KkItemReport item;
        item.item = "evenly_quasiconcave_search";
        item.pass = true;
        item.samples = opts.separation_trials;
        for (int trial = 0; trial < opts.separation_trials; ++trial) {
            Rng r = rng.fork(5000 + trial);
            ScenarioDensity qs = random_density(sp, r);
            Rv ys = random_g_measurable(r, sp, -2.0, 2.0);
            std::vector<double> ks = k.eval(ys, qs, sp);
            GSet a = GSet::empty();
            for (int b = 0; b < sp.block_count(); ++b)
                if (!ext::is_pinf(ks[b])) a = a.unite(GSet::single(b));
            if (a.empty_set()) {
                note(item, "trial " + std::to_string(trial) + ": no finite block, skipped");
                continue;
            }
            std::vector<double> alpha(sp.block_count(), 0.0);
            for (int b = 0; b < sp.block_count(); ++b)
                alpha[b] = ext::is_finite(ks[b]) ? ks[b] + r.uniform(0.3, 1.0) : 1.0;

            // grid of pairs at or above the cut on a
            std::vector<std::pair<Rv, ScenarioDensity>> upper;
            for (int c = 0; c < 36; ++c) {
                Rng rc = r.fork(c);
                ScenarioDensity qc = (c == 0) ? qs : random_density(sp, rc);
                Rv yc = (c == 0) ? ys : random_g_measurable(rc, sp, -2.0, 4.0);
                yc = bump_g_measurable(rc, yc, sp, 0.0, 2.0);
                std::vector<double> kc = k.eval(yc, qc, sp);
                bool above = true;
                for (int b = 0; b < sp.block_count(); ++b)
                    if (a.contains(b) && !ext::le(alpha[b], kc[b], 0.0)) above = false;
                if (above) upper.emplace_back(std::move(yc), std::move(qc));
            }
            ++rep.separation_trials;
            if (upper.empty()) {
                ++rep.separation_successes;  // nothing to separate from
                continue;
            }

            bool all_blocks_ok = true;
            for (int b = 0; b < sp.block_count() && all_blocks_ok; ++b) {
                if (!a.contains(b)) continue;
                const auto& atoms = sp.block_atoms(b);
                const int kk = static_cast<int>(atoms.size());
                // variables: x_1..x_k and the margin; the scale is pinned to 1
                LinearProgram lp(kk + 1);
                lp.maximize = true;
                lp.objective[kk] = 1.0;
                for (const auto& [yc, qc] : upper) {
                    std::vector<double> row(kk + 1, 0.0);
                    for (int i = 0; i < kk; ++i)
                        row[i] = sp.cond_weight(atoms[i]) * (qc.z[atoms[i]] - qs.z[atoms[i]]);
                    row[kk] = -1.0;
                    double rhs = -(yc[atoms[0]] - ys[atoms[0]]);
                    lp.add_row(std::move(row), LpRel::ge, rhs);
                }
                for (int i = 0; i < kk; ++i) {
                    std::vector<double> hi(kk + 1, 0.0), lo(kk + 1, 0.0);
                    hi[i] = 1.0;
                    lp.add_row(std::move(hi), LpRel::le, opts.separation_box);
                    lo[i] = -1.0;
                    lp.add_row(std::move(lo), LpRel::le, opts.separation_box);
                }
                std::vector<double> cap(kk + 1, 0.0);
                cap[kk] = 1.0;
                lp.add_row(std::move(cap), LpRel::le, 1e6);
                LpResult sol = solve_lp(lp);
                if (sol.status != LpStatus::optimal || !(sol.objective > 1e-9))
                    all_blocks_ok = false;
            }
            if (all_blocks_ok) {
                ++rep.separation_successes;
            } else {
                item.inconclusive = true;
                note(item, "trial " + std::to_string(trial) +
                               ": separator not found within the search box");
            }
        }
        item.pass = !item.inconclusive;
        rep.items.push_back(std::move(item));
    }

    return rep;
}

CheckReport sup_inf_fixed_point_check(const DualCandidate& k, const Rv& level_star,
                                      const ScenarioDensity& q_star, const FilteredSpace& sp,
                                      Rng rng, double tol, int scenario_count) {
    CheckReport rep;
    rep.check = "sup_inf_fixed_point";
    rep.measure = k.label;
    rep.pass = true;
    rep.samples = scenario_count;

    std::vector<double> target = k.eval(level_star, q_star, sp);

    // inf of K(E_Q[-X|.],Q) over { E_Qstar[-X|.] >= level_star }, blockwise,
    // descending from the built-in feasible anchor X = -level_star
    auto psi_block = [&](const ScenarioDensity& q, int b, double early_exit) {
        const auto& atoms = sp.block_atoms(b);
        const int kk = static_cast<int>(atoms.size());
        Rv lvl = level_star;
        auto eval_at = [&](const std::vector<double>& xi) {
            double m = 0.0;
            for (int i = 0; i < kk; ++i) m -= sp.cond_weight(atoms[i]) * q.z[atoms[i]] * xi[i];
            for (int a : atoms) lvl[a] = m;
            return k.value_on_block(lvl, q, sp, b);
        };
        // directions that never leave the half-space: ratio-balanced pair
        // moves (zero drift against the anchor density) and single-coordinate
        // pushes where the anchor density vanishes
        std::vector<std::vector<double>> dirs;
        for (int i = 0; i < kk; ++i) {
            double di = sp.cond_weight(atoms[i]) * q_star.z[atoms[i]];
            if (di <= 1e-300) {
                std::vector<double> v(kk, 0.0);
                v[i] = 1.0;
                dirs.push_back(v);
                v[i] = -1.0;
                dirs.push_back(std::move(v));
                continue;
            }
            for (int j = i + 1; j < kk; ++j) {
                double dj = sp.cond_weight(atoms[j]) * q_star.z[atoms[j]];
                if (dj <= 1e-300) continue;
                std::vector<double> v(kk, 0.0);
                v[i] = 1.0 / di;
                v[j] = -1.0 / dj;
                dirs.push_back(v);
                for (auto& u : v) u = -u;
                dirs.push_back(std::move(v));
            }
        }
        // pure cash shifts upward keep the constraint slack nonnegative
        dirs.push_back(std::vector<double>(kk, -1.0));

        std::vector<double> xi(kk, -level_star[atoms[0]]);
        double best = eval_at(xi);
        double step = 1.0;
        int evals = 0;
        while (step > 1e-6 && evals < 700 && best > early_exit) {
            bool improved = false;
            for (const auto& d : dirs) {
                std::vector<double> xi2 = xi;
                for (int i = 0; i < kk; ++i) xi2[i] += step * d[i];
                double v = eval_at(xi2);
                ++evals;
                if (v < best - 1e-12) {
                    best = v;
                    xi = xi2;
                    // double down while the same move keeps paying
                    for (int walk = 0; walk < 40 && best > early_exit; ++walk) {
                        for (int i = 0; i < kk; ++i) xi2[i] += step * d[i];
                        double v2 = eval_at(xi2);
                        ++evals;
                        if (!(v2 < best - 1e-12)) break;
                        best = v2;
                        xi = xi2;
                        step *= 2.0;
                    }
                    improved = true;
                    break;
                }
                if (evals >= 700 || best <= early_exit) break;
            }
            if (!improved) step *= 0.5;
        }
        return best;
    };

    for (int b = 0; b < sp.block_count(); ++b) {
        double tgt = target[b];
        // the anchor scenario must attain the value (the witness -level_star
        // short-circuits the upper side)
        double at_anchor = psi_block(q_star, b, ext::is_finite(tgt) ? tgt - tol : -1e9);
        if (ext::is_finite(tgt)) {
            if (at_anchor < tgt - tol || at_anchor > tgt + tol) {
                rep.pass = false;
                rep.details.push_back("anchor scenario misses the target on block " +
                                      std::to_string(b) + ": " + std::to_string(at_anchor) +
                                      " vs " + std::to_string(tgt));
            }
            rep.max_gap = std::max(rep.max_gap, std::abs(at_anchor - tgt));
        } else if (ext::is_minf(tgt)) {
            if (!(at_anchor <= -1e6 || ext::is_minf(at_anchor))) {
                rep.pass = false;
                rep.details.push_back("anchor scenario stays bounded on block " +
                                      std::to_string(b));
            }
        }
    }

    for (int s = 0; s < scenario_count && rep.pass; ++s) {
        Rng r = rng.fork(s);
        ScenarioDensity q = random_density(sp, r);
        for (int b = 0; b < sp.block_count(); ++b) {
            double tgt = target[b];
            if (ext::is_pinf(tgt)) continue;  // nothing can exceed +inf
            double early = ext::is_finite(tgt) ? tgt + tol / 2 : -1e7;
            double got = psi_block(q, b, early);
            bool ok = ext::is_finite(tgt) ? got <= tgt + tol : (got <= -1e6 || ext::is_minf(got));
            if (!ok) {
                rep.pass = false;
                rep.details.push_back("scenario " + std::to_string(s) + " block " +
                                      std::to_string(b) + ": inner infimum stuck at " +
                                      std::to_string(got) + " above " + std::to_string(tgt));
            }
        }
    }
    return rep;
}

std::vector<double> reconstruct_from_candidate(const DualCandidate& k, const RiskMeasure& rho_hint,
                                               const Rv& x, const FilteredSpace& sp,
                                               int grid_resolution) {
    std::vector<double> best(sp.block_count(), -ext::inf);
    for (int b = 0; b < sp.block_count(); ++b) {
        const auto& atoms = sp.block_atoms(b);
        const int kk = static_cast<int>(atoms.size());
        std::vector<std::vector<double>> cands = block_scenario_grid(sp, b, grid_resolution, 4000);
        if (rho_hint.name() == "entropic") {
            double gamma = rho_hint.params().at("gamma");
            double top = -ext::inf;
            for (int i = 0; i < kk; ++i) top = std::max(top, -gamma * x[atoms[i]]);
            double denom = 0.0;
            std::vector<double> tilt(kk);
            for (int i = 0; i < kk; ++i) {
                tilt[i] = std::exp(-gamma * x[atoms[i]] - top);
                denom += sp.cond_weight(atoms[i]) * tilt[i];
            }
            for (auto& v : tilt) v /= denom;
            cands.push_back(std::move(tilt));
        }
        ScenarioDensity q = reference_density(sp);
        for (const auto& zb : cands) {
            for (int i = 0; i < kk; ++i) q.z[atoms[i]] = zb[i];
            Rv lvl = q_conditional_expectation(q, x, sp);
            for (auto& v : lvl) v = -v;
            double v = k.value_on_block(lvl, q, sp, b);
            if (v > best[b]) best[b] = v;
        }
        for (int i = 0; i < kk; ++i) q.z[atoms[i]] = 1.0;
    }
    return best;
}

UniquenessReport uniqueness_check(const RiskMeasure& rho, const DualCandidate& k,
                                  const FilteredSpace& sp, Rng rng, int samples, double tol) {
    UniquenessReport rep;
    rep.label = k.label;

    // precondition: the candidate reconstructs the measure
    rep.precondition_ok = true;
    for (int s = 0; s < std::max(4, samples / 4); ++s) {
        Rng r = rng.fork(900 + s);
        Rv x = random_rv(r, sp);
        std::vector<double> rec = reconstruct_from_candidate(k, rho, x, sp);
        Rv rx = rho.evaluate(x, sp);
        for (int b = 0; b < sp.block_count(); ++b) {
            double g = ext::gap(rec[b], rx[sp.block_atoms(b)[0]]);
            rep.reconstruction_gap = std::max(rep.reconstruction_gap, g);
            if (g > 20 * tol) rep.precondition_ok = false;
        }
    }
    if (!rep.precondition_ok) {
        rep.details.push_back("candidate does not reconstruct the measure (gap " +
                              std::to_string(rep.reconstruction_gap) + "); agreement not claimed");
        rep.pass = false;
        return rep;
    }

    rep.pass = true;
    for (int s = 0; s < samples; ++s) {
        Rng r = rng.fork(s);
        ScenarioDensity q = random_density(sp, r);
        Rv y = random_g_measurable(r, sp, -3.0, 3.0);
        std::vector<double> kv = k.eval(y, q, sp);
        DualValue canon = dual_value(rho, y, q, sp);
        for (int b = 0; b < sp.block_count(); ++b) {
            double g = ext::gap(kv[b], canon.value[b]);
            rep.max_gap = std::max(rep.max_gap, g);
            if (g > 3 * tol) {
                rep.pass = false;
                if (rep.details.size() < 8)
                    rep.details.push_back("sample " + std::to_string(s) + " block " +
                                          std::to_string(b) + ": candidate " +
                                          std::to_string(kv[b]) + " vs canonical " +
                                          std::to_string(canon.value[b]));
            }
        }
    }
    return rep;
}

}  // namespace riskdual
