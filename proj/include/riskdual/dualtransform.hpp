#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "riskdual/optimize.hpp"
#include "riskdual/probspace.hpp"
#include "riskdual/riskmeasures.hpp"
#include "riskdual/rng.hpp"
#include "riskdual/scenarios.hpp"

// The dual side of the representation: the minimal risk over positions whose
// weighted expected loss meets a level. Everything is blockwise; analytic
// closed forms take precedence for catalog measures and the numeric descent
// path doubles as the cross-check and the fallback.

namespace riskdual {

enum class DualMethod { analytic, numeric };

struct DualEvalOptions {
    MinimizeOptions opt;
    bool use_analytic = true;
    std::uint64_t seed = 7;

    DualEvalOptions() { opt.max_evals = 60000; }
};

struct DualValue {
    std::vector<double> value;       // one extended value per block
    std::vector<DualMethod> method;  // per block
    std::vector<bool> feasible;      // per block; false => value is +inf
    std::vector<std::string> note;   // certificates and flags, per block
    Rv witness;                      // assembled near-minimizer (finite blocks)
};

// Infimum of rho over { xi : E[mu xi | block] >= level } for a general
// per-atom functional density mu; feasibility per block (a block where mu
// vanishes is feasible iff level <= 0 there). Numeric path only.
DualValue dual_value_general(const RiskMeasure& rho, const Rv& level, const Rv& mu,
                             const FilteredSpace& sp, const DualEvalOptions& opts = {});

// Equality-constrained form at a scenario density: infimum of rho over
// { xi : E_Q[-xi | block] = level }. Requires a monotone decreasing regular
// measure (the two forms coincide there); rejects others.
DualValue dual_value(const RiskMeasure& rho, const Rv& level, const ScenarioDensity& q,
                     const FilteredSpace& sp, const DualEvalOptions& opts = {});

// Inequality-constrained form at a scenario density, always numeric; the
// independent route used to confirm the equality reduction.
DualValue dual_value_ineq(const RiskMeasure& rho, const Rv& level, const ScenarioDensity& q,
                          const FilteredSpace& sp, DualEvalOptions opts = {});

// One block of the equality-constrained value: level is a scalar, z_block the
// density restricted to the block's atoms. The building brick of the search
// loops, where whole-space evaluation would waste a factor of the block count.
double dual_value_block(const RiskMeasure& rho, double level,
                        const std::vector<double>& z_block, const FilteredSpace& sp, int block,
                        const DualEvalOptions& opts = {}, std::uint64_t seed_salt = 0);

// Convex conjugate against the negated scenario: blockwise supremum of
// E_Q[-xi|block] - rho(xi).
DualValue conjugate_penalty(const RiskMeasure& rho, const ScenarioDensity& q,
                            const FilteredSpace& sp, const DualEvalOptions& opts = {});

// Tabulated/evaluable dual surface with provenance and per-block tolerance.
struct DualSurface {
    RiskMeasure source;
    DualEvalOptions opts;
    bool analytic = false;
    double tolerance = 1e-4;  // 1e-8 when a closed form backs every block

    DualValue eval(const Rv& level, const ScenarioDensity& q, const FilteredSpace& sp) const {
        return dual_value(source, level, q, sp, opts);
    }
};

DualSurface make_dual_surface(const RiskMeasure& rho);

bool has_analytic_dual(const RiskMeasure& rho);

struct CheckReport {
    std::string check;
    std::string measure;
    bool pass = false;
    int samples = 0;
    double max_gap = 0.0;
    std::vector<std::string> details;  // capped at a handful
};

// cash-additive identity: dual value at the scenario loss level equals that
// level minus the conjugate penalty
CheckReport cas_identity_check(const RiskMeasure& rho, const Rv& x, const ScenarioDensity& q,
                               const FilteredSpace& sp, double tol = 1e-8,
                               const DualEvalOptions& opts = {});

// one-sided bound that holds for every measure, convex or not
CheckReport ddd_inequality_check(const RiskMeasure& rho, const Rv& x, const ScenarioDensity& q,
                                 const FilteredSpace& sp, double slack = 1e-9,
                                 const DualEvalOptions& opts = {});

// per-scenario lower bound: the dual value never exceeds the measure itself
CheckReport weak_duality_check(const RiskMeasure& rho, const Rv& x, const FilteredSpace& sp,
                               Rng rng, int scenario_count = 12, double tol = 1e-7,
                               const DualEvalOptions& opts = {});

struct SupSearchOptions {
    int grid_resolution = 8;
    std::uint64_t per_block_cap = 600;  // grid resolution adapts down to fit
    int refine_budget = 200;            // ascent evaluations per block
    bool parallel = true;
    DualEvalOptions eval;
};

struct DualitySupResult {
    std::vector<double> sup;        // per block
    std::vector<double> rho_value;  // per block
    std::vector<double> gap;        // per block, inf when only one side is infinite
    ScenarioDensity argmax;         // blockwise maximizers pasted together
    std::vector<int> candidates_tried;
    bool budget_exhausted = false;
    std::vector<std::string> notes;

    double max_gap() const;
};

// Supremum of the dual value over scenario densities, blockwise grid plus
// local ascent in the conditional-law simplex, with catalog warm starts.
DualitySupResult duality_sup(const RiskMeasure& rho, const Rv& x, const FilteredSpace& sp,
                             const SupSearchOptions& opts = {});

// The sampled property battery for the dual surface of one measure: level
// monotonicity, scaling invariance, level locality, lattice identities,
// quasi-affinity in the position, scenario-independent infimum, downward
// directedness with witnesses.
std::vector<CheckReport> dual_surface_properties(const RiskMeasure& rho, const FilteredSpace& sp,
                                                 Rng rng, int samples,
                                                 const DualEvalOptions& opts = {});

}  // namespace riskdual
