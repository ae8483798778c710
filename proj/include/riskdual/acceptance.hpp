#pragma once

#include <functional>
#include <string>
#include <vector>

#include "riskdual/dualtransform.hpp"
#include "riskdual/riskmeasures.hpp"

// Level-indexed acceptance sets and the bijection with conditional risk
// measures: a measure induces the family of its lower level sets, a family
// induces the measure that charges each position the least level accepting
// it, and the two constructions invert each other.

namespace riskdual {

struct RiskAcceptanceFamily {
    std::string label;
    double probe_box = 8.0;  // levels are searched per block in [-box, box]
    // does x belong to the acceptance set at this (block-constant) level?
    std::function<bool(const Rv& level, const Rv& x, const FilteredSpace&)> member;
    Rv normalization_shift;  // the recorded shift that pinned rho(0) = 0
};

// Lower level sets of a measure, normalized so the zero position carries zero
// risk; the applied shift is recorded on the family. Requires rho(0) finite.
RiskAcceptanceFamily family_from_measure(const RiskMeasure& rho, const FilteredSpace& sp);

// Blockwise bisection for the least accepting level; +inf when no level in
// the probe box admits the position (box exhaustion is noted in the name).
RiskMeasure measure_from_family(const RiskAcceptanceFamily& fam, const FilteredSpace& sp,
                                double level_resolution = 1e-9);

struct FamilyAuditReport {
    AuditReport convexity;
    AuditReport monotonicity;
    AuditReport regularity;
    bool all_pass() const {
        return convexity.pass && monotonicity.pass && regularity.pass;
    }
};

FamilyAuditReport audit_family(const RiskAcceptanceFamily& fam, const FilteredSpace& sp, Rng rng,
                               int samples, double tol = 1e-6);

struct RoundtripReport {
    CheckReport measure_side;   // measure -> family -> measure returns it
    CheckReport family_side;    // family -> measure -> family returns it (right-continuous)
    bool pass() const { return measure_side.pass && family_side.pass; }
};

RoundtripReport roundtrip_check(const RiskMeasure& rho, const FilteredSpace& sp, Rng rng,
                                int samples, double tol = 1e-6);

}  // namespace riskdual
