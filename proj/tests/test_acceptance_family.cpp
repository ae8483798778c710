#include <doctest.h>

#include "riskdual/acceptance.hpp"
#include "riskdual/sampling.hpp"

using namespace riskdual;

namespace {

FilteredSpace uniform22() { return FilteredSpace::uniform({2, 2}); }

}  // namespace

TEST_CASE("level sets of the linear measure") {
    auto sp = uniform22();
    RiskAcceptanceFamily fam = family_from_measure(expected_loss_measure(), sp);
    Rv zero(4, 0.0);
    CHECK(fam.member(zero, zero, sp));  // the zero position is accepted at level zero

    Rv x{1, 2, 3, 4};
    // acceptance kicks in exactly at the blockwise average losses
    CHECK(fam.member(from_block_values({-1.5, -3.5}, sp), x, sp));
    CHECK(fam.member(from_block_values({-1.0, -3.0}, sp), x, sp));
    CHECK(!fam.member(from_block_values({-1.6, -3.5}, sp), x, sp));
    CHECK(!fam.member(from_block_values({-1.5, -3.6}, sp), x, sp));

    RiskAcceptanceFamily wc = family_from_measure(worst_case_measure(), sp);
    CHECK(wc.member(from_block_values({-1.0, -3.0}, sp), x, sp));
    CHECK(!wc.member(from_block_values({-1.1, -3.0}, sp), x, sp));
}

TEST_CASE("infinite-at-zero measures cannot induce a family") {
    auto sp = uniform22();
    CHECK_THROWS(family_from_measure(pathological_infinite_measure(GSet::single(0)), sp));
}

TEST_CASE("the induced measure inverts the family") {
    auto sp = uniform22();
    Rng rng(3);
    for (const auto& m : {expected_loss_measure(), worst_case_measure(), entropic_measure(1.0)}) {
        RiskAcceptanceFamily fam = family_from_measure(m, sp);
        RiskMeasure back = measure_from_family(fam, sp);
        for (int t = 0; t < 25; ++t) {
            Rng r = rng.fork(t);
            Rv x = random_rv(r, sp, -3.0, 3.0);
            Rv direct = m.evaluate(x, sp);
            Rv rebuilt = back.evaluate(x, sp);
            for (int a = 0; a < 4; ++a)
                CHECK(rebuilt[a] == doctest::Approx(direct[a]).epsilon(1e-6));
        }
    }
}

TEST_CASE("a hand-rolled family returns the worst case") {
    auto sp = uniform22();
    RiskAcceptanceFamily fam;
    fam.label = "blockwise_loss_cap";
    fam.member = [](const Rv& level, const Rv& x, const FilteredSpace& s) {
        for (int b = 0; b < s.block_count(); ++b)
            for (int a : s.block_atoms(b))
                if (-x[a] > level[s.block_atoms(b)[0]] + 1e-12) return false;
        return true;
    };
    RiskMeasure back = measure_from_family(fam, sp);
    Rv x{1, 2, 3, 4};
    Rv got = back.evaluate(x, sp);
    CHECK(got[0] == doctest::Approx(-1.0).epsilon(1e-7));
    CHECK(got[2] == doctest::Approx(-3.0).epsilon(1e-7));

    // a family rejecting everything maps to +inf
    RiskAcceptanceFamily never;
    never.label = "empty";
    never.member = [](const Rv&, const Rv&, const FilteredSpace&) { return false; };
    Rv v = measure_from_family(never, sp).evaluate(x, sp);
    for (double u : v) CHECK(ext::is_pinf(u));
}

TEST_CASE("roundtrips hold for the quasiconvex catalog") {
    auto sp = uniform22();
    for (const auto& m : {expected_loss_measure(), worst_case_measure(), entropic_measure(0.5),
                          certainty_equivalent_measure(32.0)}) {
        RoundtripReport rep = roundtrip_check(m, sp, Rng(7), 40);
        INFO(m.name());
        CHECK(rep.measure_side.pass);
        CHECK(rep.family_side.pass);
    }
}

TEST_CASE("family audits pass for induced families of the quasiconvex catalog") {
    auto sp = uniform22();
    for (const auto& m : {expected_loss_measure(), worst_case_measure(), entropic_measure(1.0)}) {
        RiskAcceptanceFamily fam = family_from_measure(m, sp);
        FamilyAuditReport rep = audit_family(fam, sp, Rng(11), 40);
        INFO(m.name());
        CHECK(rep.all_pass());
    }
}

TEST_CASE("the quantile family is not conditionally convex") {
    auto sp = uniform22();
    RiskAcceptanceFamily fam = family_from_measure(conditional_var_measure(0.5), sp);
    FamilyAuditReport rep = audit_family(fam, sp, Rng(13), 120);
    CHECK(!rep.convexity.pass);     // union-of-boxes level sets
    CHECK(rep.monotonicity.pass);   // still monotone
    CHECK(rep.regularity.pass);     // and regular
}

TEST_CASE("measures induced by audited families pass the measure audits") {
    auto sp = uniform22();
    RiskAcceptanceFamily fam = family_from_measure(entropic_measure(1.0), sp);
    RiskMeasure back = measure_from_family(fam, sp);
    CHECK(audit_reg(back, sp, Rng(17), 30, 1e-6).pass);
    CHECK(audit_mon_down(back, sp, Rng(19), 30, 1e-6).pass);
    CHECK(audit_qco(back, sp, Rng(23), 30, 1e-6).pass);
}
