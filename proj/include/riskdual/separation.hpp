#pragma once

#include <optional>
#include <string>
#include <vector>

#include "riskdual/lp.hpp"
#include "riskdual/probspace.hpp"

// Conditional evenly-convex geometry at finite scale. Every question is
// blockwise: a set described by finitely many generators, closed under
// pasting across blocks, restricts on each block to the chosen hull of the
// generator restrictions. Membership and separation are per-block linear
// programs (or plain projections for flat hulls).

namespace riskdual {

enum class HullMode { convex, cone, affine, linear, concat };

std::string hull_mode_name(HullMode m);
std::optional<HullMode> parse_hull_mode(const std::string& s);

struct HullSet {
    std::vector<Rv> generators;
    HullMode mode = HullMode::convex;
    // optional recession directions, honored in convex mode (hull + cone(rays))
    std::vector<Rv> rays;
};

struct TrivialComponent {
    GSet a_c;  // blocks where the hull fills everything; separation impossible
    GSet d_c;  // complement
    bool probe_based = false;  // verdict from probe targets, not a rank test
};

// Largest union of blocks on which the restricted hull spans every target.
// Flat hulls (affine/linear) get a rank test; cone/convex/concat hulls are
// probed with +-B e_j targets and the verdict is flagged probe-based.
TrivialComponent trivial_component(const HullSet& c, const FilteredSpace& sp);

struct OutsideVerdict {
    int block = 0;
    bool outside = false;
    std::string certificate;
};

struct OutsideReport {
    TrivialComponent tc;
    std::vector<OutsideVerdict> verdicts;  // one per block of d_c
    bool outside_everywhere = false;       // outside on every block of d_c
};

OutsideReport is_outside(const Rv& x, const HullSet& c, const FilteredSpace& sp);

struct SeparationResult {
    bool ok = false;        // strict margin on every block of d_c
    Rv z;                   // per-atom dual vector (zero on a_c blocks)
    std::vector<double> margins;     // per block; only d_c blocks meaningful
    GSet d_c;
    std::vector<int> boundary_blocks;  // blocks where the best margin was <= 0
};

// Functional with E[z x | block] > E[z g | block] for every generator (hence
// every hull element) on each block of d_c. Margins are recomputed by direct
// dot products after the LP, never read off the tableau.
SeparationResult separate(const Rv& x, const HullSet& c, const FilteredSpace& sp);

// Pasting closure of the generators: every blockwise selection, deduplicated.
// Throws when |generators|^blocks exceeds the cap.
std::vector<Rv> concatenation_hull(const std::vector<Rv>& generators, const FilteredSpace& sp,
                                   std::uint64_t cap = 65536);

// Is x in the restricted hull on the given block?
bool block_hull_member(const Rv& x, const HullSet& c, const FilteredSpace& sp, int block,
                       double tol = 1e-9);

}  // namespace riskdual
