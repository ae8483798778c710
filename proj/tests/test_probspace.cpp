#include <doctest.h>

#include <cmath>

#include "riskdual/probspace.hpp"
#include "riskdual/rng.hpp"
#include "riskdual/sampling.hpp"

using namespace riskdual;

namespace {

// independent per-block weighted average, the oracle for the projection
Rv average_oracle(const Rv& x, const FilteredSpace& sp) {
    Rv out(sp.atom_count());
    for (int b = 0; b < sp.block_count(); ++b) {
        double num = 0.0, den = 0.0;
        for (int a : sp.block_atoms(b)) {
            num += sp.weight(a) * x[a];
            den += sp.weight(a);
        }
        for (int a : sp.block_atoms(b)) out[a] = num / den;
    }
    return out;
}

FilteredSpace uniform22() { return FilteredSpace::uniform({2, 2}); }

}  // namespace

TEST_CASE("space validation") {
    CHECK_THROWS(FilteredSpace({0.5, 0.5, 0.1}, {0, 0, 1}));           // sum != 1
    CHECK_THROWS(FilteredSpace({1.0, 0.0}, {0, 1}));                   // zero weight
    CHECK_THROWS(FilteredSpace({0.5, -0.5, 1.0}, {0, 0, 1}));          // negative weight
    CHECK_THROWS(FilteredSpace({0.5, 0.5}, {0}));                      // label count
    FilteredSpace sp({0.25, 0.25, 0.5}, {7, 7, 3});                    // labels relabelled
    CHECK(sp.block_count() == 2);
    CHECK(sp.block_of(2) == 1);
    CHECK(sp.block_prob(0) == doctest::Approx(0.5));
    CHECK(sp.cond_weight(0) == doctest::Approx(0.5));
}

TEST_CASE("conditional expectation fixes block-constant variables") {
    auto sp = uniform22();
    Rv x{2, 2, 5, 5};
    CHECK(conditional_expectation(x, sp) == x);
}

TEST_CASE("conditional expectation is the blockwise weighted average") {
    auto sp = uniform22();
    Rv x{1, 2, 3, 4};
    Rv got = conditional_expectation(x, sp);
    Rv frozen{1.5, 1.5, 3.5, 3.5};
    for (int a = 0; a < 4; ++a) {
        CHECK(got[a] == doctest::Approx(frozen[a]));
        CHECK(got[a] == doctest::Approx(average_oracle(x, sp)[a]));
    }

    Rng rng(42);
    for (int t = 0; t < 50; ++t) {
        Rng r = rng.fork(t);
        FilteredSpace s = random_space(r);
        Rv y = random_rv(r, s);
        Rv a = conditional_expectation(y, s);
        Rv o = average_oracle(y, s);
        for (int i = 0; i < s.atom_count(); ++i) CHECK(a[i] == doctest::Approx(o[i]).epsilon(1e-12));
        CHECK(is_g_measurable(a, s));
    }
}

TEST_CASE("infinite values propagate per block like the truncated limits") {
    auto sp = uniform22();
    Rv x{ext::inf, 0, 1, 1};
    Rv got = conditional_expectation(x, sp);
    CHECK(ext::is_pinf(got[0]));
    CHECK(ext::is_pinf(got[1]));
    CHECK(got[2] == doctest::Approx(1.0));

    // monotone truncation oracle: E[min(x, n) | blocks] for growing n
    double prev = -1e300;
    for (double n : {10.0, 100.0, 1000.0, 1e6}) {
        Rv cut(4);
        for (int a = 0; a < 4; ++a) cut[a] = std::min(x[a], n);
        double v = conditional_expectation(cut, sp)[0];
        CHECK(v >= prev);
        prev = v;
    }
    CHECK(prev >= 1e5);  // diverges on the block carrying +inf
}

TEST_CASE("mixed infinities fall back to the cancellation convention and flag") {
    auto sp = uniform22();
    CondExpFlags flags;
    Rv x{ext::inf, -ext::inf, 1, 2};
    Rv got = conditional_expectation(x, sp, &flags);
    REQUIRE(flags.mixed_infinity_blocks.size() == 1);
    CHECK(flags.mixed_infinity_blocks[0] == 0);
    CHECK(ext::is_finite(got[0]));
}

TEST_CASE("extended scalar rules") {
    CHECK(ext::add(ext::inf, -ext::inf) == 0.0);
    CHECK(ext::add(-ext::inf, ext::inf) == 0.0);
    CHECK(ext::sub(ext::inf, ext::inf) == 0.0);
    CHECK(ext::is_pinf(ext::add(ext::inf, 5.0)));
    CHECK_THROWS(ext::mul(0.0, ext::inf));
    CHECK_THROWS(ext::div(1.0, 0.0));
    CHECK_THROWS(ext::div(ext::inf, ext::inf));
    CHECK(ext::gap(ext::inf, ext::inf) == 0.0);
    CHECK(ext::is_pinf(ext::gap(ext::inf, 3.0)));
    CHECK(ext::le(-ext::inf, -ext::inf));
    CHECK(ext::le(3.0, ext::inf));
    CHECK(!ext::le(ext::inf, 3.0));
}

TEST_CASE("projection linearity is exact in rational arithmetic") {
    std::vector<Rational> w{{1, 4}, {1, 4}, {1, 4}, {1, 4}};
    std::vector<int> blocks{0, 0, 1, 1};
    std::vector<Rational> x1{{1, 3}, {2, 7}, {5, 11}, {1, 2}};
    std::vector<Rational> x2{{4, 9}, {1, 13}, {3, 5}, {2, 3}};
    std::vector<Rational> sum(4);
    for (int i = 0; i < 4; ++i) sum[i] = x1[i] + x2[i];
    auto e1 = conditional_expectation_exact(x1, w, blocks);
    auto e2 = conditional_expectation_exact(x2, w, blocks);
    auto es = conditional_expectation_exact(sum, w, blocks);
    for (int i = 0; i < 4; ++i) CHECK(es[i] == e1[i] + e2[i]);
}

TEST_CASE("projection is additive in float mode") {
    Rng rng(19);
    for (int t = 0; t < 40; ++t) {
        Rng r = rng.fork(t);
        FilteredSpace sp = random_space(r);
        Rv x1 = random_rv(r, sp), x2 = random_rv(r, sp);
        Rv sum(sp.atom_count());
        for (int a = 0; a < sp.atom_count(); ++a) sum[a] = x1[a] + x2[a];
        Rv es = conditional_expectation(sum, sp);
        Rv e1 = conditional_expectation(x1, sp);
        Rv e2 = conditional_expectation(x2, sp);
        for (int a = 0; a < sp.atom_count(); ++a)
            CHECK(std::abs(es[a] - (e1[a] + e2[a])) <= 1e-12);
    }
}

TEST_CASE("norm definiteness per block") {
    Rng rng(23);
    for (int t = 0; t < 20; ++t) {
        Rng r = rng.fork(t);
        FilteredSpace sp = random_space(r, 8, 3);
        Rv x = random_rv(r, sp, 0.5, 3.0);
        int dead = r.uniform_int(0, sp.block_count() - 1);
        for (int a : sp.block_atoms(dead)) x[a] = 0.0;
        for (double p : {1.0, 2.0, 7.0, ext::inf}) {
            Rv n = conditional_p_norm(x, sp, p);
            for (int b = 0; b < sp.block_count(); ++b) {
                int a0 = sp.block_atoms(b)[0];
                if (b == dead) CHECK(n[a0] == 0.0);
                else CHECK(n[a0] > 0.0);  // all weights strictly positive
            }
        }
    }
}

TEST_CASE("pull-out and tower properties") {
    Rng rng(7);
    for (int t = 0; t < 40; ++t) {
        Rng r = rng.fork(t);
        FilteredSpace sp = random_space(r);
        Rv x = random_rv(r, sp, 0.0, 4.0);
        Rv y = random_g_measurable(r, sp, 0.0, 3.0);
        Rv yx(sp.atom_count());
        for (int a = 0; a < sp.atom_count(); ++a) yx[a] = y[a] * x[a];
        Rv lhs = conditional_expectation(yx, sp);
        Rv ex = conditional_expectation(x, sp);
        for (int a = 0; a < sp.atom_count(); ++a)
            CHECK(lhs[a] == doctest::Approx(y[a] * ex[a]).epsilon(1e-12));

        CHECK(expectation(ex, sp) == doctest::Approx(expectation(x, sp)).epsilon(1e-12));
    }
}

TEST_CASE("conditional p-norm examples and axioms") {
    auto sp = uniform22();
    Rv x{1, -1, 2, -2};
    Rv frozen{1, 1, 2, 2};

    Rv p2 = conditional_p_norm(x, sp, 2.0);
    Rv pinf = conditional_p_norm(x, sp, ext::inf);
    for (int a = 0; a < 4; ++a) {
        CHECK(p2[a] == doctest::Approx(frozen[a]));  // blockwise root mean square
        CHECK(pinf[a] == doctest::Approx(frozen[a]));
    }

    CHECK_THROWS(conditional_p_norm(x, sp, 0.5));
    CHECK_THROWS(conditional_p_norm(x, sp, -1.0));
    CHECK_THROWS(conditional_p_norm(Rv{ext::inf, 0, 0, 0}, sp, 2.0));

    // homogeneity against block-constant factors
    Rv gamma{3, 3, 0.5, 0.5};
    for (double p : {1.0, 2.0, 7.0, ext::inf}) {
        Rv gx(4);
        for (int a = 0; a < 4; ++a) gx[a] = gamma[a] * x[a];
        Rv lhs = conditional_p_norm(gx, sp, p);
        Rv base = conditional_p_norm(x, sp, p);
        for (int a = 0; a < 4; ++a)
            CHECK(lhs[a] == doctest::Approx(std::abs(gamma[a]) * base[a]).epsilon(1e-12));
    }

    // triangle inequality and definiteness on random data
    Rng rng(11);
    for (int t = 0; t < 30; ++t) {
        Rng r = rng.fork(t);
        FilteredSpace s = random_space(r);
        Rv a = random_rv(r, s), b = random_rv(r, s);
        Rv ab(s.atom_count());
        for (int i = 0; i < s.atom_count(); ++i) ab[i] = a[i] + b[i];
        for (double p : {1.0, 2.0, 7.0, ext::inf}) {
            Rv na = conditional_p_norm(a, s, p);
            Rv nb = conditional_p_norm(b, s, p);
            Rv nab = conditional_p_norm(ab, s, p);
            for (int i = 0; i < s.atom_count(); ++i) CHECK(nab[i] <= na[i] + nb[i] + 1e-9);
        }
        Rv zero(s.atom_count(), 0.0);
        Rv nz = conditional_p_norm(zero, s, 2.0);
        for (double v : nz) CHECK(v == 0.0);
    }
}

TEST_CASE("pasting over a disjoint cover") {
    auto sp = uniform22();
    Rv ones(4, 1.0), twos(4, 2.0);
    GSet b0 = GSet::single(0), b1 = GSet::single(1);
    Rv got = paste({ones, twos}, {b0, b1}, sp);
    CHECK(got == Rv{1, 1, 2, 2});

    Rv x{3, 1, 4, 1};
    CHECK(paste({x}, {sp.all_blocks()}, sp) == x);

    CHECK_THROWS(paste({ones, twos}, {b0, b0}, sp));               // overlap
    CHECK_THROWS(paste({ones}, {b0}, sp));                         // no cover

    // three constants over three blocks
    FilteredSpace sp3 = FilteredSpace::uniform({2, 2, 2});
    Rv a(6, 1.0), b(6, 2.0), c(6, 3.0);
    Rv pasted = paste({a, b, c}, {GSet::single(0), GSet::single(1), GSet::single(2)}, sp3);
    CHECK(pasted == Rv{1, 1, 2, 2, 3, 3});
}

TEST_CASE("block-constant predicate") {
    auto sp = uniform22();
    CHECK(is_g_measurable(Rv{1, 1, 2, 2}, sp));
    CHECK(!is_g_measurable(Rv{1, 2, 2, 2}, sp));
    Rng rng(3);
    for (int t = 0; t < 20; ++t) {
        Rng r = rng.fork(t);
        FilteredSpace s = random_space(r);
        CHECK(is_g_measurable(conditional_expectation(random_rv(r, s), s), s));
    }
}

TEST_CASE("restriction and block value helpers") {
    auto sp = uniform22();
    Rv x{1, 2, 3, 4};
    Rv cut = restrict_to(x, GSet::single(1), sp);
    CHECK(cut == Rv{0, 0, 3, 4});
    Rv blocky = from_block_values({5, 6}, sp);
    CHECK(blocky == Rv{5, 5, 6, 6});
    CHECK(block_values(blocky, sp) == std::vector<double>{5, 6});
}
