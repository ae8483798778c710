#include <doctest.h>

#include "riskdual/maximalsets.hpp"
#include "riskdual/sampling.hpp"
#include "riskdual/separation.hpp"

using namespace riskdual;

namespace {

FilteredSpace uniform22() { return FilteredSpace::uniform({2, 2}); }

// oracle: scan all 2^m block sets for the maximal one where the relation
// holds pointwise for every closure element; ditto for a single violator
struct BruteResult {
    GSet a_m, a_m_perp;
};

BruteResult brute_force(const std::vector<Rv>& f_class, const Rv& y0, Relation rel,
                        const FilteredSpace& sp) {
    std::vector<Rv> closure = concatenation_hull(f_class, sp);
    BruteResult out{GSet::empty(), GSet::empty()};
    const int m = sp.block_count();
    for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
        GSet g{mask};
        bool all_hold = true;
        for (const auto& y : closure)
            for (int b = 0; b < m && all_hold; ++b)
                if (g.contains(b))
                    for (int a : sp.block_atoms(b))
                        if (!relation_holds(y[a], y0[a], rel)) { all_hold = false; break; }
        if (all_hold) out.a_m = out.a_m.unite(g);
        bool some_violates = false;
        for (const auto& y : closure) {
            bool all_atoms = true;
            for (int b = 0; b < m && all_atoms; ++b)
                if (g.contains(b))
                    for (int a : sp.block_atoms(b))
                        if (relation_holds(y[a], y0[a], rel)) { all_atoms = false; break; }
            if (all_atoms) { some_violates = true; break; }
        }
        if (some_violates) out.a_m_perp = out.a_m_perp.unite(g);
    }
    return out;
}

}  // namespace

TEST_CASE("maximal sets on the stated cases") {
    auto sp = uniform22();
    Rv y0(4, 0.0);

    MaximalSetsResult r1 = maximal_sets({Rv{-1, -1, 2, 3}}, y0, Relation::ge, sp);
    CHECK(r1.a_m == GSet::single(1));
    CHECK(r1.a_m_perp == GSet::single(0));
    CHECK(r1.cover_ok);
    for (int a : sp.block_atoms(0)) CHECK(r1.witness[a] < 0);

    MaximalSetsResult r2 = maximal_sets({Rv(4, 0.0)}, y0, Relation::ge, sp);
    CHECK(r2.a_m == sp.all_blocks());
    CHECK(r2.a_m_perp.empty_set());
    CHECK(r2.cover_ok);

    // mixed signs inside block 0: no single element violates pointwise there
    MaximalSetsResult r3 =
        maximal_sets({Rv{1, -1, 2, 3}, Rv{-1, 1, 2, 3}}, y0, Relation::ge, sp);
    CHECK(r3.a_m == GSet::single(1));
    CHECK(!r3.cover_ok);
    REQUIRE(r3.uncovered_blocks.size() == 1);
    CHECK(r3.uncovered_blocks[0] == 0);
}

TEST_CASE("maximal sets agree with the exhaustive oracle") {
    Rng rng(17);
    int agreements = 0;
    for (int t = 0; t < 150; ++t) {
        Rng r = rng.fork(t);
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

        MaximalSetsResult got = maximal_sets(f_class, y0, rel, sp);
        BruteResult want = brute_force(f_class, y0, rel, sp);
        CHECK(got.a_m == want.a_m);
        CHECK(got.a_m_perp == want.a_m_perp);
        CHECK(got.cover_ok == (want.a_m.unite(want.a_m_perp) == sp.all_blocks()));
        // the witness violates pointwise on the perp set
        for (int b = 0; b < sp.block_count(); ++b)
            if (got.a_m_perp.contains(b))
                for (int a : sp.block_atoms(b))
                    CHECK(!relation_holds(got.witness[a], y0[a], rel));
        ++agreements;
    }
    CHECK(agreements == 150);
}

TEST_CASE("class supremum") {
    auto sp = uniform22();
    ClassSupremum s1 = ess_sup_class({GSet::single(0), GSet::single(1)}, false);
    CHECK(s1.sup == sp.all_blocks());

    ClassSupremum s2 = ess_sup_class({}, true);
    CHECK(s2.sup.empty_set());
    CHECK(s2.maximal_element_in_class);

    // nested chain closed under unions: the top element is a member
    ClassSupremum s3 = ess_sup_class({GSet{1}, GSet{3}, GSet{7}}, true);
    CHECK(s3.sup == GSet{7});
    CHECK(s3.maximal_element_in_class);

    // union missing from the class is reported
    ClassSupremum s4 = ess_sup_class({GSet{1}, GSet{2}}, true);
    CHECK(s4.sup == GSet{3});
    CHECK(!s4.maximal_element_in_class);
}

TEST_CASE("trivial component grows with the generator set") {
    Rng rng(29);
    for (int t = 0; t < 20; ++t) {
        Rng r = rng.fork(t);
        FilteredSpace sp = random_space(r, 6, 3);
        HullSet small;
        small.mode = HullMode::linear;
        small.generators = {random_rv(r, sp)};
        HullSet big = small;
        for (int e = 0; e < 6; ++e) big.generators.push_back(random_rv(r, sp));
        GSet a_small = trivial_component(small, sp).a_c;
        GSet a_big = trivial_component(big, sp).a_c;
        CHECK(a_small.intersect(a_big) == a_small);  // monotone
    }
}
