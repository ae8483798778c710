#include <doctest.h>

#include <cmath>

#include "riskdual/mclass.hpp"
#include "riskdual/sampling.hpp"

using namespace riskdual;

namespace {

FilteredSpace uniform22() { return FilteredSpace::uniform({2, 2}); }

// hand-written closed form of the entropic dual surface
DualCandidate entropic_formula(double gamma) {
    DualCandidate k;
    k.label = "entropic_formula";
    k.eval = [gamma](const Rv& level, const ScenarioDensity& q, const FilteredSpace& sp) {
        std::vector<double> out(sp.block_count());
        for (int b = 0; b < sp.block_count(); ++b) {
            double rel = 0.0;
            for (int a : sp.block_atoms(b))
                if (q.z[a] > 0) rel += sp.cond_weight(a) * q.z[a] * std::log(q.z[a]);
            out[b] = level[sp.block_atoms(b)[0]] - rel / gamma;
        }
        return out;
    };
    return k;
}

}  // namespace

TEST_CASE("axiom battery passes for catalog duals") {
    auto sp = uniform22();
    KkAuditOptions opts;
    opts.samples = 40;
    opts.separation_trials = 10;
    for (const auto& m : {entropic_measure(1.0), worst_case_measure(), expected_loss_measure()}) {
        KkReport rep = audit_kk(candidate_from_measure(m), sp, Rng(31), opts);
        INFO(m.name());
        CHECK(rep.all_required_pass());
        CHECK(rep.separation_successes == rep.separation_trials);
    }
}

TEST_CASE("decreasing candidates fail the monotonicity axiom") {
    auto sp = uniform22();
    DualCandidate k;
    k.label = "decreasing";
    k.eval = [](const Rv& level, const ScenarioDensity&, const FilteredSpace& sp) {
        std::vector<double> out(sp.block_count());
        for (int b = 0; b < sp.block_count(); ++b) out[b] = -level[sp.block_atoms(b)[0]];
        return out;
    };
    KkAuditOptions opts;
    opts.samples = 30;
    opts.separation_trials = 0;
    KkReport rep = audit_kk(k, sp, Rng(37), opts);
    bool mono_failed = false;
    for (const auto& item : rep.items)
        if (item.item == "level_monotone" && !item.pass) mono_failed = true;
    CHECK(mono_failed);
}

TEST_CASE("scenario-locality violations are caught") {
    auto sp = uniform22();
    // block 0 peeks at the density on the other block
    DualCandidate k;
    k.label = "peeking";
    k.eval = [](const Rv& level, const ScenarioDensity& q, const FilteredSpace& sp) {
        std::vector<double> out(sp.block_count());
        for (int b = 0; b < sp.block_count(); ++b) out[b] = level[sp.block_atoms(b)[0]];
        out[0] += q.z[sp.atom_count() - 1];
        return out;
    };
    KkAuditOptions opts;
    opts.samples = 40;
    opts.separation_trials = 0;
    KkReport rep = audit_kk(k, sp, Rng(41), opts);
    bool locality_failed = false;
    for (const auto& item : rep.items)
        if (item.item == "scenario_locality" && !item.pass) locality_failed = true;
    CHECK(locality_failed);
}

TEST_CASE("sup-inf fixed point for catalog duals") {
    auto sp = uniform22();
    Rng rng(43);
    for (int t = 0; t < 5; ++t) {
        Rng r = rng.fork(t);
        Rv y = random_g_measurable(r, sp, -2.0, 2.0);
        ScenarioDensity q = random_density(sp, r);

        CheckReport el =
            sup_inf_fixed_point_check(candidate_from_measure(expected_loss_measure()), y,
                                      reference_density(sp), sp, r.fork(1));
        CHECK(el.pass);

        CheckReport wc = sup_inf_fixed_point_check(candidate_from_measure(worst_case_measure()), y,
                                                   q, sp, r.fork(2));
        CHECK(wc.pass);
    }
    // entropic anchor at the reference with level zero: both sides vanish
    Rv zero(sp.atom_count(), 0.0);
    CheckReport en = sup_inf_fixed_point_check(candidate_from_measure(entropic_measure(1.0)), zero,
                                               reference_density(sp), sp, Rng(47));
    CHECK(en.pass);
}

TEST_CASE("uniqueness: the formula matches the computed dual") {
    auto sp = uniform22();
    // candidate = closed form, canonical side = numeric descent
    DualEvalOptions numeric;
    numeric.use_analytic = false;
    UniquenessReport rep =
        uniqueness_check(entropic_measure(1.0), entropic_formula(1.0), sp, Rng(53), 15);
    CHECK(rep.precondition_ok);
    CHECK(rep.pass);
}

TEST_CASE("uniqueness: the computed dual agrees with itself") {
    auto sp = uniform22();
    UniquenessReport rep = uniqueness_check(
        worst_case_measure(), candidate_from_measure(worst_case_measure()), sp, Rng(67), 10);
    CHECK(rep.precondition_ok);
    CHECK(rep.pass);
    CHECK(rep.max_gap == doctest::Approx(0.0));
}

TEST_CASE("uniqueness: shifted candidates are rejected at the precondition") {
    auto sp = uniform22();
    DualCandidate shifted = entropic_formula(1.0);
    shifted.label = "entropic_formula_shifted";
    auto base = shifted.eval;
    shifted.eval = [base](const Rv& level, const ScenarioDensity& q, const FilteredSpace& sp) {
        auto v = base(level, q, sp);
        for (auto& u : v) u += 0.5;
        return v;
    };
    UniquenessReport rep =
        uniqueness_check(entropic_measure(1.0), shifted, sp, Rng(59), 10);
    CHECK(!rep.precondition_ok);
    CHECK(!rep.pass);
    CHECK(rep.reconstruction_gap > 0.2);
}

TEST_CASE("two candidates reconstructing the measure agree with each other") {
    auto sp = uniform22();
    DualCandidate a = entropic_formula(1.0);
    DualCandidate b = candidate_from_measure(entropic_measure(1.0));
    Rng rng(61);
    double worst = 0.0;
    for (int t = 0; t < 20; ++t) {
        Rng r = rng.fork(t);
        ScenarioDensity q = random_density(sp, r);
        Rv y = random_g_measurable(r, sp, -3.0, 3.0);
        auto va = a.eval(y, q, sp);
        auto vb = b.eval(y, q, sp);
        for (int blk = 0; blk < sp.block_count(); ++blk)
            worst = std::max(worst, ext::gap(va[blk], vb[blk]));
    }
    CHECK(worst < 3e-4);
}
