#pragma once

#include <string>
#include <vector>

#include "riskdual/probspace.hpp"

namespace riskdual {

enum class Relation { ge, le, eq, gt, lt };

std::string relation_name(Relation r);
bool relation_holds(double a, double b, Relation r);

struct MaximalSetsResult {
    // relation against y0 holds pointwise, for every element of the pasting
    // closure, on every atom of these blocks
    GSet a_m;
    // a single pasted witness violates pointwise on every atom of these blocks
    GSet a_m_perp;
    Rv witness;  // the pasted violator; meaningful on a_m_perp
    // blocks in neither set: the pasting-closure hypothesis cannot deliver a
    // two-set split there, which is surfaced, not papered over
    std::vector<int> uncovered_blocks;
    bool cover_ok = false;
};

// The two maximal sets for a finite class closed under blockwise pasting.
// The closure is computed from the list, never assumed.
MaximalSetsResult maximal_sets(const std::vector<Rv>& f_class, const Rv& y0, Relation rel,
                               const FilteredSpace& sp);

struct ClassSupremum {
    GSet sup;
    bool maximal_element_in_class = false;  // union found among the inputs
};

// Union of the listed sets; when closed_under_union is declared the union is
// checked to be a member (the maximal element).
ClassSupremum ess_sup_class(const std::vector<GSet>& sets, bool closed_under_union);

}  // namespace riskdual
