#include "riskdual/acceptance.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "riskdual/sampling.hpp"

namespace riskdual {

RiskAcceptanceFamily family_from_measure(const RiskMeasure& rho, const FilteredSpace& sp) {
    Rv zero(sp.atom_count(), 0.0);
    Rv at_zero = rho.evaluate(zero, sp);
    for (double v : at_zero)
        if (!ext::is_finite(v))
            throw std::invalid_argument(
                "family_from_measure: rho(0) must be finite for the level-set family");
    RiskAcceptanceFamily fam;
    fam.label = "levels(" + rho.name() + ")";
    fam.normalization_shift = at_zero;
    fam.member = [rho, at_zero](const Rv& level, const Rv& x, const FilteredSpace& space) {
        Rv v = rho.evaluate(x, space);
        for (int b = 0; b < space.block_count(); ++b) {
            int a0 = space.block_atoms(b)[0];
            double shifted = ext::is_finite(v[a0]) ? v[a0] - at_zero[a0] : v[a0];
            if (!ext::le(shifted, level[a0], 1e-12)) return false;
        }
        return true;
    };
    return fam;
}

RiskMeasure measure_from_family(const RiskAcceptanceFamily& fam, const FilteredSpace&,
                                double level_resolution) {
    const double box = fam.probe_box;
    auto fam_copy = fam;
    auto full = [fam_copy, box, level_resolution](const Rv& x, const FilteredSpace& space) {
        Rv out(space.atom_count());
        for (int b = 0; b < space.block_count(); ++b) {
            // membership probed with the working level on this block and the
            // box ceiling elsewhere, which is exactly what regularity makes
            // block-independent
            auto member_at = [&](double y) {
                std::vector<double> per_block(space.block_count(), box);
                per_block[b] = y;
                return fam_copy.member(from_block_values(per_block, space), x, space);
            };
            double v;
            if (!member_at(box)) {
                v = ext::inf;  // no level in the box accepts the position
            } else if (member_at(-box)) {
                v = -box;  // at or below the floor of the probe box
            } else {
                double lo = -box, hi = box;
                while (hi - lo > level_resolution) {
                    double mid = 0.5 * (lo + hi);
                    (member_at(mid) ? hi : lo) = mid;
                }
                v = hi;
            }
            for (int a : space.block_atoms(b)) out[a] = v;
        }
        return out;
    };
    RiskMeasure m = RiskMeasure::from_full("from_family(" + fam.label + ")", full,
                                           {Property::reg, Property::mon_down, Property::qco});
    return m;
}

namespace {

void record(AuditReport& rep, const std::string& what, int block, double lhs, double rhs) {
    if (rep.violations.size() < 8) rep.violations.push_back({what, block, lhs, rhs});
}

}  // namespace

FamilyAuditReport audit_family(const RiskAcceptanceFamily& fam, const FilteredSpace& sp, Rng rng,
                               int samples, double tol) {
    FamilyAuditReport out;
    out.convexity.audit = "family_convexity";
    out.monotonicity.audit = "family_monotonicity";
    out.regularity.audit = "family_regularity";
    out.convexity.measure = out.monotonicity.measure = out.regularity.measure = fam.label;
    out.convexity.pass = out.monotonicity.pass = out.regularity.pass = true;
    out.convexity.samples = out.monotonicity.samples = out.regularity.samples = samples;

    RiskMeasure induced = measure_from_family(fam, sp);

    for (int s = 0; s < samples; ++s) {
        Rng r = rng.fork(s);
        Rv level = random_g_measurable(r, sp, -2.0, 3.0);

        // collect members by rejection inside the probe box
        std::vector<Rv> members;
        for (int t = 0; t < 60 && members.size() < 3; ++t) {
            Rv cand = random_rv(r, sp, -3.0, 3.0);
            if (fam.member(level, cand, sp)) members.push_back(std::move(cand));
        }
        if (members.size() < 2) continue;

        // (convexity) conditional mixes stay accepted
        Rv lam = random_mixing(r, sp);
        Rv mix(sp.atom_count());
        for (int a = 0; a < sp.atom_count(); ++a)
            mix[a] = lam[a] * members[0][a] + (1.0 - lam[a]) * members[1][a];
        if (!fam.member(level, mix, sp))
            record(out.convexity, "mix of accepted positions rejected", -1, 0.0, 0.0);

        // (monotonicity in the position and in the level)
        Rv up = members[0];
        for (auto& v : up) v += r.uniform(0.0, 2.0);
        if (!fam.member(level, up, sp))
            record(out.monotonicity, "dominating position rejected", -1, 0.0, 0.0);
        Rv higher = level;
        for (auto& v : higher) v += r.uniform(0.0, 2.0);
        if (!fam.member(higher, members[0], sp))
            record(out.monotonicity, "higher level rejected a member", -1, 0.0, 0.0);

        // (regularity) least accepting level localizes across blocks
        GSet g = random_gset(r, sp);
        if (!g.empty_set()) {
            Rv full_levels = induced.evaluate(members[0], sp);
            Rv cut = restrict_to(members[0], g, sp);
            Rv cut_levels = induced.evaluate(cut, sp);
            for (int b = 0; b < sp.block_count(); ++b) {
                if (!g.contains(b)) continue;
                int a0 = sp.block_atoms(b)[0];
                // rho(0) = 0 after normalization, so off-g blocks do not bind
                if (ext::gap(full_levels[a0], cut_levels[a0]) > tol &&
                    !(full_levels[a0] <= -fam.probe_box + tol &&
                      cut_levels[a0] <= -fam.probe_box + tol))
                    record(out.regularity, "restriction moved the least level", b, full_levels[a0],
                           cut_levels[a0]);
            }
        }
    }
    out.convexity.pass = out.convexity.violations.empty();
    out.monotonicity.pass = out.monotonicity.violations.empty();
    out.regularity.pass = out.regularity.violations.empty();
    return out;
}

RoundtripReport roundtrip_check(const RiskMeasure& rho, const FilteredSpace& sp, Rng rng,
                                int samples, double tol) {
    RoundtripReport out;
    out.measure_side.check = "measure_roundtrip";
    out.family_side.check = "family_roundtrip";
    out.measure_side.measure = out.family_side.measure = rho.name();
    out.measure_side.pass = out.family_side.pass = true;
    out.measure_side.samples = out.family_side.samples = samples;

    RiskAcceptanceFamily fam = family_from_measure(rho, sp);
    RiskMeasure back = measure_from_family(fam, sp);
    Rv shift = fam.normalization_shift;

    for (int s = 0; s < samples; ++s) {
        Rng r = rng.fork(s);
        Rv x = random_rv(r, sp, -3.0, 3.0);
        Rv direct = rho.evaluate(x, sp);
        Rv rebuilt = back.evaluate(x, sp);
        for (int b = 0; b < sp.block_count(); ++b) {
            int a0 = sp.block_atoms(b)[0];
            // the rebuilt measure returns the normalized level
            double want = ext::is_finite(direct[a0]) ? direct[a0] - shift[a0] : direct[a0];
            double g = ext::gap(rebuilt[a0], want);
            out.measure_side.max_gap = std::max(out.measure_side.max_gap, g);
            if (g > tol && !(want < -fam.probe_box)) {
                out.measure_side.pass = false;
                if (out.measure_side.details.size() < 8)
                    out.measure_side.details.push_back(
                        "sample " + std::to_string(s) + " block " + std::to_string(b) + ": " +
                        std::to_string(rebuilt[a0]) + " vs " + std::to_string(want));
            }
        }

        // family side: membership agrees away from the level-set boundary
        Rv level = random_g_measurable(r, sp, -2.0, 2.0);
        RiskAcceptanceFamily fam2 = family_from_measure(back, sp);
        bool lhs = fam.member(level, x, sp);
        Rv norm = rho.evaluate(x, sp);
        bool boundary = false;
        for (int b = 0; b < sp.block_count(); ++b) {
            int a0 = sp.block_atoms(b)[0];
            double v = ext::is_finite(norm[a0]) ? norm[a0] - shift[a0] : norm[a0];
            if (ext::is_finite(v) && std::abs(v - level[a0]) < 10 * tol) boundary = true;
        }
        if (boundary) continue;
        bool rhs = fam2.member(level, x, sp);
        if (lhs != rhs) {
            out.family_side.pass = false;
            if (out.family_side.details.size() < 8)
                out.family_side.details.push_back("sample " + std::to_string(s) +
                                                  ": membership flipped through the roundtrip");
        }
    }
    return out;
}

}  // namespace riskdual
