#pragma once

#include <functional>
#include <string>
#include <vector>

#include "riskdual/dualtransform.hpp"

// Candidate dual functions and the axiom battery deciding membership in the
// class where the dual of a measure is unique: monotone in the level, local
// in both arguments, scenario-free infimum, diamond-evenly quasiconcave (as a
// constructive search), upward directed along scenarios.

namespace riskdual {

struct DualCandidate {
    std::string label;
    // per-block extended values at a block-constant level and a density
    std::function<std::vector<double>(const Rv& level, const ScenarioDensity& q,
                                      const FilteredSpace& sp)> eval;
    // optional single-block shortcut used by the search loops; falls back to
    // eval when absent (locality is one of the audited axioms)
    std::function<double(double level, const std::vector<double>& z_block,
                         const FilteredSpace& sp, int block)> eval_block;

    double value_on_block(const Rv& level, const ScenarioDensity& q, const FilteredSpace& sp,
                          int block) const;
};

// K = the computed dual surface of a measure
DualCandidate candidate_from_measure(const RiskMeasure& rho, const DualEvalOptions& opts = {});

struct KkItemReport {
    std::string item;
    bool pass = false;
    bool inconclusive = false;  // only the constructive search may report this
    int samples = 0;
    std::vector<std::string> details;
};

struct KkReport {
    std::string label;
    std::vector<KkItemReport> items;
    int separation_successes = 0;  // constructive-search tallies
    int separation_trials = 0;

    bool all_required_pass() const;  // items other than the constructive search
};

struct KkAuditOptions {
    int samples = 100;
    double tol = 1e-4;
    int separation_trials = 20;
    double separation_box = 100.0;  // coefficient bound in the search LP
    std::uint64_t seed = 11;
};

KkReport audit_kk(const DualCandidate& k, const FilteredSpace& sp, Rng rng,
                  const KkAuditOptions& opts = {});

// sup over scenarios of the inf of K over the feasible half-space returns
// K's own value at the anchor pair
CheckReport sup_inf_fixed_point_check(const DualCandidate& k, const Rv& level_star,
                                      const ScenarioDensity& q_star, const FilteredSpace& sp,
                                      Rng rng, double tol = 1e-4, int scenario_count = 14);

struct UniquenessReport {
    std::string label;
    bool precondition_ok = false;  // K reconstructs the measure
    double reconstruction_gap = 0.0;
    bool pass = false;  // K agrees with the canonical infimum form
    double max_gap = 0.0;
    std::vector<std::string> details;
};

// K reconstructing rho within tolerance must agree with the canonical dual.
UniquenessReport uniqueness_check(const RiskMeasure& rho, const DualCandidate& k,
                                  const FilteredSpace& sp, Rng rng, int samples = 30,
                                  double tol = 1e-4);

// the reconstruction sup at one position (shared by the uniqueness check)
std::vector<double> reconstruct_from_candidate(const DualCandidate& k, const RiskMeasure& rho_hint,
                                               const Rv& x, const FilteredSpace& sp,
                                               int grid_resolution = 6);

}  // namespace riskdual
