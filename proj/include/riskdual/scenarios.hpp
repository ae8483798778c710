#pragma once

#include <cstdint>
#include <vector>

#include "riskdual/probspace.hpp"
#include "riskdual/rng.hpp"

namespace riskdual {

// Nonnegative per-atom density with conditional mean 1 on every block; the
// change-of-measure carrier for alternative scenarios.
struct ScenarioDensity {
    Rv z;
};

// both invariants: z >= 0 atomwise and blockwise conditional mean 1 (1e-10)
bool validate_scenario(const ScenarioDensity& q, const FilteredSpace& sp);

// Conditional expectation of x under the reweighted measure: E[z x | blocks].
Rv q_conditional_expectation(const ScenarioDensity& q, const Rv& x, const FilteredSpace& sp);

// 1_f * z1 + 1_{f^c} * z2; stays a valid density because the constraint is
// blockwise and f is a union of blocks.
ScenarioDensity paste_scenarios(const ScenarioDensity& z1, const ScenarioDensity& z2, GSet f,
                                const FilteredSpace& sp);

ScenarioDensity reference_density(const FilteredSpace& sp);

// Density that puts all conditional mass of `block` on `atom` (atom must lie
// in the block); identity elsewhere.
ScenarioDensity vertex_density(const FilteredSpace& sp, int block, int atom);

// Random valid density: iid positive draws renormalized blockwise.
ScenarioDensity random_density(const FilteredSpace& sp, Rng& rng);

// All densities whose blockwise conditional law lies on the lattice
// {t / resolution : t integer composition} of the block simplex — one entry
// per combination across blocks (vertices always included; the reference
// density appended when the lattice misses it). Throws if the combined count
// exceeds `cap`, reporting the count.
std::vector<ScenarioDensity> scenario_grid(const FilteredSpace& sp, int resolution,
                                           std::uint64_t cap = 200000);

// Per-block restrictions of the same lattice: each entry is a density value
// per atom of the block (the search space of the blockwise sup). Vertices are
// always present; the block's reference restriction is appended if missing.
std::vector<std::vector<double>> block_scenario_grid(const FilteredSpace& sp, int block,
                                                     int resolution, std::uint64_t cap = 200000);

// Number of lattice points the full grid would have (used for cap messages).
std::uint64_t scenario_grid_size(const FilteredSpace& sp, int resolution);

}  // namespace riskdual
