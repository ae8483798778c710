#include "riskdual/maximalsets.hpp"

#include <stdexcept>

namespace riskdual {

std::string relation_name(Relation r) {
    switch (r) {
        case Relation::ge: return ">=";
        case Relation::le: return "<=";
        case Relation::eq: return "==";
        case Relation::gt: return ">";
        case Relation::lt: return "<";
    }
    return "?";
}

bool relation_holds(double a, double b, Relation r) {
    // plain IEEE comparisons do the right thing for +-inf
    switch (r) {
        case Relation::ge: return a >= b;
        case Relation::le: return a <= b;
        case Relation::eq: return a == b;
        case Relation::gt: return a > b;
        case Relation::lt: return a < b;
    }
    return false;
}

namespace {

bool negation_holds(double a, double b, Relation r) { return !relation_holds(a, b, r); }

}  // namespace

MaximalSetsResult maximal_sets(const std::vector<Rv>& f_class, const Rv& y0, Relation rel,
                               const FilteredSpace& sp) {
    if (f_class.empty()) throw std::invalid_argument("maximal_sets: empty class");
    validate_rv(y0, sp);
    for (const auto& y : f_class) validate_rv(y, sp);

    MaximalSetsResult res;
    res.a_m = GSet::empty();
    res.a_m_perp = GSet::empty();
    res.witness.assign(sp.atom_count(), 0.0);

    // Restricted to one block, the pasting closure contributes exactly the
    // restrictions of the listed elements, so both maximal sets reduce to a
    // per-block scan over the list.
    std::vector<int> violator_of_block(sp.block_count(), -1);
    for (int b = 0; b < sp.block_count(); ++b) {
        bool all_hold = true;
        for (const auto& y : f_class) {
            for (int a : sp.block_atoms(b))
                if (!relation_holds(y[a], y0[a], rel)) { all_hold = false; break; }
            if (!all_hold) break;
        }
        int violator = -1;
        for (std::size_t idx = 0; idx < f_class.size() && violator < 0; ++idx) {
            bool all_violate = true;
            for (int a : sp.block_atoms(b))
                if (!negation_holds(f_class[idx][a], y0[a], rel)) { all_violate = false; break; }
            if (all_violate) violator = static_cast<int>(idx);
        }
        if (all_hold) {
            res.a_m = res.a_m.unite(GSet::single(b));
        } else if (violator >= 0) {
            res.a_m_perp = res.a_m_perp.unite(GSet::single(b));
            violator_of_block[b] = violator;
        } else {
            res.uncovered_blocks.push_back(b);
        }
    }

    // paste the per-block violators into one witness
    for (int b = 0; b < sp.block_count(); ++b) {
        int pick = violator_of_block[b] >= 0 ? violator_of_block[b] : 0;
        for (int a : sp.block_atoms(b)) res.witness[a] = f_class[pick][a];
    }
    res.cover_ok = res.uncovered_blocks.empty();
    return res;
}

ClassSupremum ess_sup_class(const std::vector<GSet>& sets, bool closed_under_union) {
    ClassSupremum out;
    out.sup = GSet::empty();
    for (const GSet& s : sets) out.sup = out.sup.unite(s);
    if (closed_under_union) {
        for (const GSet& s : sets)
            if (s == out.sup) { out.maximal_element_in_class = true; break; }
        if (sets.empty()) out.maximal_element_in_class = true;  // empty union, vacuously
    }
    return out;
}

}  // namespace riskdual
