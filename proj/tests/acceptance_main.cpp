// End-to-end verification battery. Each numbered criterion prints exactly one
// PASS/FAIL line; the process exits 1 if any line failed. Tolerances are
// pinned here, not configurable: loosening them would defeat the point.
//
// Known honest failure: the loss-quantile measure (conditional_var) is not
// evenly quasiconvex at the position level, so the strong-duality criterion
// cannot hold for it; its rows report the witnessed gap instead of being
// quietly skipped. Everything it is actually entitled to (weak duality, the
// conjugate bound, the dual-surface properties, the measure roundtrip) is
// asserted and passes.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "riskdual/acceptance.hpp"
#include "riskdual/config.hpp"
#include "riskdual/dualtransform.hpp"
#include "riskdual/maximalsets.hpp"
#include "riskdual/mclass.hpp"
#include "riskdual/report.hpp"
#include "riskdual/sampling.hpp"
#include "riskdual/separation.hpp"

using namespace riskdual;
using clock_type = std::chrono::steady_clock;

namespace {

int g_failures = 0;

void criterion(int number, const std::string& name, bool pass, const std::string& detail) {
    std::printf("[%2d] %-34s %s  %s\n", number, name.c_str(), pass ? "PASS" : "FAIL",
                detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

std::vector<RiskMeasure> duality_measures() {
    return {entropic_measure(0.5),          entropic_measure(1.0),
            entropic_measure(2.0),          worst_case_measure(),
            expected_loss_measure(),        conditional_var_measure(0.25),
            conditional_var_measure(0.5)};
}

std::string tag(const RiskMeasure& m) {
    std::string t = m.name();
    for (const auto& [k, v] : m.params()) t += ":" + k + "=" + format_number(v);
    return t;
}

// ---- 1: representation supremum ----------------------------------------
void criterion_duality() {
    auto t0 = clock_type::now();
    bool pass = true;
    std::ostringstream detail;
    for (const auto& rho : duality_measures()) {
        bool analytic = has_analytic_dual(rho);
        double tol = analytic ? 1e-6 : 1e-3;
        SupSearchOptions opts;
        opts.grid_resolution = analytic ? 8 : 6;
        opts.per_block_cap = analytic ? 600 : 64;
        opts.refine_budget = analytic ? 200 : 60;
        if (!analytic) {
            opts.eval.opt.multistarts = 3;
            opts.eval.opt.max_sweeps = 80;
            opts.eval.opt.max_evals = 8000;
        }
        double worst = 0.0;
        Rng rng(20250801);
        for (int si = 0; si < 20; ++si) {
            Rng rs = rng.fork(si);
            FilteredSpace sp = random_space(rs, 12, 4);
            for (int xi = 0; xi < 20; ++xi) {
                Rng rx = rs.fork(100 + xi);
                Rv x = random_rv(rx, sp);
                DualitySupResult res = duality_sup(rho, x, sp, opts);
                worst = std::max(worst, res.max_gap());
            }
        }
        bool ok = worst <= tol;
        pass = pass && ok;
        detail << tag(rho) << (ok ? " ok(" : " gap(") << format_number(worst) << ") ";
    }
    double secs = std::chrono::duration<double>(clock_type::now() - t0).count();
    bool in_time = secs <= 60.0;
    pass = pass && in_time;
    detail << "runtime " << format_number(secs) << "s";
    criterion(1, "duality gap per catalog measure", pass, detail.str());
}

// ---- 2: cash-additive closed-form identity ------------------------------
void criterion_cas_identity() {
    bool pass = true;
    double worst = 0.0;
    Rng rng(77001);
    std::vector<RiskMeasure> measures{entropic_measure(0.5),   entropic_measure(1.0),
                                      entropic_measure(2.0),   expected_loss_measure(),
                                      worst_case_measure()};
    for (int s = 0; s < 50; ++s) {
        Rng r = rng.fork(s);
        FilteredSpace sp = random_space(r, 10, 4);
        Rv x = random_rv(r, sp);
        ScenarioDensity q = random_density(sp, r);
        for (const auto& m : measures) {
            CheckReport rep = cas_identity_check(m, x, q, sp, 1e-8);
            worst = std::max(worst, rep.max_gap);
            pass = pass && rep.pass;
        }
    }
    criterion(2, "cash-additive dual identity", pass, "max gap " + format_number(worst));
}

// ---- 3: conjugate lower bound -------------------------------------------
void criterion_conjugate_bound() {
    bool pass = true;
    int violations = 0;
    Rng rng(77002);
    std::vector<RiskMeasure> catalog{
        expected_loss_measure(),     worst_case_measure(),
        entropic_measure(0.5),       entropic_measure(2.0),
        certainty_equivalent_measure(32.0), conditional_var_measure(0.25),
        conditional_var_measure(0.5), pathological_infinite_measure(GSet::single(0))};
    for (int s = 0; s < 200; ++s) {
        Rng r = rng.fork(s);
        FilteredSpace sp = random_space(r, 9, 3);
        Rv x = random_rv(r, sp);
        ScenarioDensity q = random_density(sp, r);
        const RiskMeasure& m = catalog[s % catalog.size()];
        CheckReport rep = ddd_inequality_check(m, x, q, sp, 1e-9);
        if (!rep.pass) {
            pass = false;
            ++violations;
        }
    }
    criterion(3, "conjugate lower bound (200 triples)", pass,
              violations == 0 ? "no violations beyond 1e-9"
                              : std::to_string(violations) + " violations");
}

// ---- 4: dual-surface property battery -----------------------------------
void criterion_surface_properties() {
    bool pass = true;
    std::ostringstream detail;
    std::vector<RiskMeasure> catalog{expected_loss_measure(),
                                     worst_case_measure(),
                                     entropic_measure(1.0),
                                     certainty_equivalent_measure(32.0),
                                     conditional_var_measure(0.25),
                                     pathological_infinite_measure(GSet::single(0))};
    for (const auto& m : catalog) {
        Rng rng(77003);
        FilteredSpace sp = random_space(rng, 8, 3);
        auto reports = dual_surface_properties(m, sp, rng.fork(1), 100);
        for (const auto& rep : reports) {
            if (!rep.pass) {
                pass = false;
                detail << tag(m) << ":" << rep.check << " ";
            }
        }
    }
    criterion(4, "dual-surface property suite", pass,
              pass ? "level monotonicity, scaling, locality, lattice, quasi-affinity, "
                     "common infimum, witnesses"
                   : detail.str());
}

// ---- 5: equality vs inequality constraint forms --------------------------
void criterion_constraint_forms() {
    bool pass = true;
    double worst = 0.0;
    std::vector<RiskMeasure> catalog{expected_loss_measure(),
                                     worst_case_measure(),
                                     entropic_measure(1.0),
                                     certainty_equivalent_measure(32.0),
                                     conditional_var_measure(0.25),
                                     pathological_infinite_measure(GSet::single(0))};
    for (const auto& m : catalog) {
        Rng rng(77004);
        for (int s = 0; s < 100; ++s) {
            Rng r = rng.fork(s);
            FilteredSpace sp = random_space(r, 8, 3);
            ScenarioDensity q = random_density(sp, r);
            Rv y = random_g_measurable(r, sp, -2.0, 2.0);
            DualValue eq = dual_value(m, y, q, sp);
            DualValue ineq = dual_value_ineq(m, y, q, sp);
            for (int b = 0; b < sp.block_count(); ++b) {
                double g = ext::gap(eq.value[b], ineq.value[b]);
                if (ext::is_minf(eq.value[b]) != ext::is_minf(ineq.value[b])) {
                    // one side certified escape: confirm the other is merely
                    // numerically deep rather than genuinely bounded
                    double fin = ext::is_minf(eq.value[b]) ? ineq.value[b] : eq.value[b];
                    if (fin < -1e5) g = 0.0;
                }
                worst = std::max(worst, std::min(g, 1.0));
                if (g > 1e-6) pass = false;
            }
        }
    }
    criterion(5, "equality vs inequality dual forms", pass, "max gap " + format_number(worst));
}

// ---- 6: dual-class axioms -------------------------------------------------
void criterion_dual_class() {
    bool pass = true;
    std::ostringstream detail;
    int succ = 0, total = 0;
    std::vector<RiskMeasure> catalog{expected_loss_measure(),
                                     worst_case_measure(),
                                     entropic_measure(1.0),
                                     certainty_equivalent_measure(32.0),
                                     conditional_var_measure(0.25),
                                     pathological_infinite_measure(GSet::single(0))};
    for (const auto& m : catalog) {
        Rng rng(77005);
        FilteredSpace sp = random_space(rng, 8, 3);
        KkAuditOptions opts;
        opts.samples = 100;
        opts.separation_trials = 20;
        DualEvalOptions ev;
        if (!has_analytic_dual(m)) {
            ev.opt.multistarts = 3;
            ev.opt.max_sweeps = 80;
            ev.opt.max_evals = 8000;
        }
        KkReport rep = audit_kk(candidate_from_measure(m, ev), sp, rng.fork(2), opts);
        if (!rep.all_required_pass()) {
            pass = false;
            detail << tag(m) << " axiom failure ";
        }
        succ += rep.separation_successes;
        total += rep.separation_trials;
    }
    double ratio = total > 0 ? static_cast<double>(succ) / total : 1.0;
    if (ratio < 0.95) pass = false;
    detail << "separations " << succ << "/" << total;
    criterion(6, "dual-class axiom audit", pass, detail.str());
}

// ---- 7: sup-inf fixed point ----------------------------------------------
void criterion_sup_inf() {
    bool pass = true;
    std::ostringstream detail;
    std::vector<RiskMeasure> catalog{expected_loss_measure(),
                                     worst_case_measure(),
                                     entropic_measure(1.0),
                                     certainty_equivalent_measure(32.0),
                                     conditional_var_measure(0.25),
                                     pathological_infinite_measure(GSet::single(0))};
    for (const auto& m : catalog) {
        Rng rng(77006);
        FilteredSpace sp = random_space(rng, 8, 3);
        DualEvalOptions ev;
        int scen = 14;
        if (!has_analytic_dual(m)) {
            ev.opt.multistarts = 2;
            ev.opt.max_sweeps = 60;
            ev.opt.max_evals = 5000;
            scen = 8;
        }
        DualCandidate k = candidate_from_measure(m, ev);
        int ok = 0;
        for (int t = 0; t < 20; ++t) {
            Rng r = rng.fork(10 + t);
            Rv y = random_g_measurable(r, sp, -2.0, 2.0);
            ScenarioDensity q = random_density(sp, r);
            CheckReport rep = sup_inf_fixed_point_check(k, y, q, sp, r.fork(3), 1e-4, scen);
            if (rep.pass) ++ok;
        }
        if (ok != 20) {
            pass = false;
            detail << tag(m) << " " << ok << "/20 ";
        }
    }
    criterion(7, "sup-inf fixed point (20 anchors each)", pass,
              pass ? "all anchors attained" : detail.str());
}

// ---- 8: acceptance-family bijection ---------------------------------------
void criterion_family_bijection() {
    bool pass = true;
    std::ostringstream detail;
    // measures inside the bijection's hypotheses (quasiconvex, finite at zero)
    std::vector<RiskMeasure> in_scope{expected_loss_measure(), worst_case_measure(),
                                      entropic_measure(1.0),
                                      certainty_equivalent_measure(32.0)};
    for (const auto& m : in_scope) {
        Rng rng(77007);
        FilteredSpace sp = random_space(rng, 9, 3);
        RoundtripReport rep = roundtrip_check(m, sp, rng.fork(1), 100, 1e-6);
        FamilyAuditReport audits =
            audit_family(family_from_measure(m, sp), sp, rng.fork(2), 100);
        if (!rep.pass() || !audits.all_pass()) {
            pass = false;
            detail << tag(m) << " ";
        }
    }
    // the quantile measure still satisfies the roundtrip (no convexity needed)
    {
        Rng rng(77008);
        FilteredSpace sp = random_space(rng, 9, 3);
        RiskMeasure var = conditional_var_measure(0.25);
        RoundtripReport rep = roundtrip_check(var, sp, rng.fork(1), 100, 1e-6);
        if (!rep.measure_side.pass) {
            pass = false;
            detail << "quantile roundtrip ";
        }
        // and its family honestly fails the convexity audit, which the suite
        // surfaces rather than hides (it sits outside the bijection's scope)
        FamilyAuditReport audits =
            audit_family(family_from_measure(var, sp), sp, rng.fork(2), 150);
        std::printf("     note: quantile family convexity audit: %s (outside the "
                    "quasiconvex hypothesis, expected)\n",
                    audits.convexity.pass ? "unexpectedly passed" : "fails as predicted");
        if (audits.convexity.pass) {
            pass = false;
            detail << "quantile family convexity unexpectedly passed ";
        }
    }
    criterion(8, "acceptance-family bijection", pass, pass ? "roundtrips and audits" : detail.str());
}

// ---- 9: maximal sets vs the exhaustive oracle ------------------------------
void criterion_maximal_sets() {
    Rng rng(77009);
    int cases = 0, agreements = 0, hypothesis_failures = 0;
    bool logic_ok = true;
    while (cases < 520) {
        Rng r = rng.fork(cases);
        FilteredSpace sp = random_space(r, 8, 4);
        int ne = r.uniform_int(1, 4);
        std::vector<Rv> f_class;
        for (int e = 0; e < ne; ++e) {
            Rv y(sp.atom_count());
            for (auto& v : y) v = static_cast<double>(r.uniform_int(-1, 2));
            f_class.push_back(std::move(y));
        }
        Rv y0(sp.atom_count(), static_cast<double>(r.uniform_int(-1, 1)));
        Relation rel = static_cast<Relation>(r.uniform_int(0, 4));
        ++cases;

        MaximalSetsResult got = maximal_sets(f_class, y0, rel, sp);

        // oracle: scan every block set against the explicit pasting closure
        std::vector<Rv> closure = concatenation_hull(f_class, sp);
        GSet want_am = GSet::empty(), want_perp = GSet::empty();
        for (std::uint32_t mask = 0; mask < (1u << sp.block_count()); ++mask) {
            GSet g{mask};
            bool all_hold = true;
            for (const auto& y : closure)
                for (int b = 0; b < sp.block_count() && all_hold; ++b)
                    if (g.contains(b))
                        for (int a : sp.block_atoms(b))
                            if (!relation_holds(y[a], y0[a], rel)) { all_hold = false; break; }
            if (all_hold) want_am = want_am.unite(g);
            for (const auto& y : closure) {
                bool all_violate = true;
                for (int b = 0; b < sp.block_count() && all_violate; ++b)
                    if (g.contains(b))
                        for (int a : sp.block_atoms(b))
                            if (relation_holds(y[a], y0[a], rel)) { all_violate = false; break; }
                if (all_violate) {
                    want_perp = want_perp.unite(g);
                    break;
                }
            }
        }
        bool agree = got.a_m == want_am && got.a_m_perp == want_perp;
        if (agree) ++agreements;
        bool oracle_cover = want_am.unite(want_perp) == sp.all_blocks();
        if (got.cover_ok != oracle_cover) logic_ok = false;
        if (!got.cover_ok) ++hypothesis_failures;
        // disjointness always
        if (!got.a_m.intersect(got.a_m_perp).empty_set()) logic_ok = false;
    }
    bool pass = agreements == cases && logic_ok && hypothesis_failures > 0;
    criterion(9, "maximal sets vs exhaustive oracle", pass,
              std::to_string(agreements) + "/" + std::to_string(cases) + " agree, " +
                  std::to_string(hypothesis_failures) + " hypothesis failures surfaced");
}

// ---- 10: separation margins and reconstruction -----------------------------
void criterion_separation() {
    bool pass = true;
    std::ostringstream detail;
    Rng rng(77010);
    for (HullMode mode : {HullMode::convex, HullMode::cone, HullMode::affine, HullMode::linear,
                          HullMode::concat}) {
        int verified = 0, run = 0;
        for (int t = 0; t < 100; ++t) {
            Rng r = rng.fork(1000 * static_cast<int>(mode) + t);
            FilteredSpace sp = random_space(r, 8, 3);
            HullSet c;
            c.mode = mode;
            int ng = r.uniform_int(1, 4);
            for (int g = 0; g < ng; ++g) c.generators.push_back(random_rv(r, sp, -1.0, 1.0));
            Rv x = random_rv(r, sp, 2.5, 5.0);  // safely outside the generator radius
            TrivialComponent tc = trivial_component(c, sp);
            if (tc.d_c.empty_set()) continue;
            OutsideReport orep = is_outside(x, c, sp);
            if (!orep.outside_everywhere) continue;
            SeparationResult sep = separate(x, c, sp);
            ++run;
            bool good = sep.ok;
            for (int b = 0; b < sp.block_count() && good; ++b) {
                if (!tc.d_c.contains(b)) continue;
                // margin recomputed from scratch
                double zx = 0.0, worstg = -1e300;
                for (int a : sp.block_atoms(b)) zx += sp.cond_weight(a) * sep.z[a] * x[a];
                for (const auto& g : c.generators) {
                    double zg = 0.0;
                    for (int a : sp.block_atoms(b)) zg += sp.cond_weight(a) * sep.z[a] * g[a];
                    worstg = std::max(worstg, zg);
                }
                if (mode == HullMode::cone) worstg = std::max(worstg, 0.0);
                if (!(zx - worstg >= 1e-9)) good = false;
            }
            if (good) ++verified;
        }
        if (verified != run || run < 50) {
            pass = false;
            detail << hull_mode_name(mode) << " " << verified << "/" << run << " ";
        }
    }

    // reconstruction: separators from outside probes keep the hull inside
    // every returned open half-space and exclude each probe
    {
        Rng r(77011);
        FilteredSpace sp = FilteredSpace::uniform({3, 2});
        HullSet box;
        box.mode = HullMode::convex;
        for (int g = 0; g < 6; ++g) box.generators.push_back(random_rv(r, sp, -1.0, 1.0));
        for (int t = 0; t < 30; ++t) {
            Rng rr = r.fork(t);
            Rv probe = random_rv(rr, sp, 2.0, 4.0);
            SeparationResult sep = separate(probe, box, sp);
            if (!sep.ok) {
                pass = false;
                detail << "reconstruction probe " << t << " not separated ";
                continue;
            }
            for (int b = 0; b < sp.block_count(); ++b) {
                double zx = 0.0;
                for (int a : sp.block_atoms(b)) zx += sp.cond_weight(a) * sep.z[a] * probe[a];
                for (const auto& g : box.generators) {
                    double zg = 0.0;
                    for (int a : sp.block_atoms(b)) zg += sp.cond_weight(a) * sep.z[a] * g[a];
                    if (!(zg < zx)) pass = false;
                }
            }
        }
    }
    criterion(10, "separation margins re-verified", pass,
              pass ? "all margins >= 1e-9, reconstruction clean" : detail.str());
}

// ---- 11: determinism --------------------------------------------------------
std::string mini_suite_report() {
    std::ostringstream out;
    FilteredSpace sp({0.125, 0.125, 0.25, 0.2, 0.3}, {0, 0, 0, 1, 1});
    Rng rng(4242);

    ReportTable t;
    t.columns = {"measure", "sample", "block", "gap"};
    for (const auto& m : {entropic_measure(1.0), worst_case_measure()}) {
        for (int s = 0; s < 4; ++s) {
            Rng r = rng.fork(s);
            Rv x = random_rv(r, sp);
            DualitySupResult res = duality_sup(m, x, sp);
            for (int b = 0; b < sp.block_count(); ++b)
                t.add_row({m.name(), std::to_string(s), std::to_string(b),
                           format_number(res.gap[b])});
        }
    }
    auto audits = audit_declared(entropic_measure(1.0), sp, Rng(7), 40);
    for (const auto& rep : audits)
        t.add_row({rep.measure, rep.audit, std::to_string(rep.samples),
                   rep.pass ? "pass" : "FAIL"});
    write_csv(out, t);
    return out.str();
}

void criterion_determinism() {
    std::string a = mini_suite_report();
    std::string b = mini_suite_report();
    criterion(11, "identical seeds, identical bytes", a == b,
              std::to_string(a.size()) + " report bytes compared");
}

}  // namespace

int main() {
    std::printf("acceptance battery, fixed seeds, pinned tolerances\n");
    std::printf("---------------------------------------------------\n");
    criterion_duality();
    criterion_cas_identity();
    criterion_conjugate_bound();
    criterion_surface_properties();
    criterion_constraint_forms();
    criterion_dual_class();
    criterion_sup_inf();
    criterion_family_bijection();
    criterion_maximal_sets();
    criterion_separation();
    criterion_determinism();
    std::printf("---------------------------------------------------\n");
    if (g_failures == 0) {
        std::printf("all criteria passed\n");
        return 0;
    }
    std::printf("%d criterion(s) failed; see the lines above\n", g_failures);
    return 1;
}
