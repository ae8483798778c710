#pragma once

#include "riskdual/probspace.hpp"
#include "riskdual/rng.hpp"

// Seeded samplers shared by the audit and verification layers.

namespace riskdual {

inline Rv random_rv(Rng& rng, const FilteredSpace& sp, double lo = -4.0, double hi = 4.0) {
    Rv x(sp.atom_count());
    for (auto& v : x) v = rng.uniform(lo, hi);
    return x;
}

inline Rv random_g_measurable(Rng& rng, const FilteredSpace& sp, double lo = -4.0,
                              double hi = 4.0) {
    std::vector<double> per_block(sp.block_count());
    for (auto& v : per_block) v = rng.uniform(lo, hi);
    return from_block_values(per_block, sp);
}

// block-constant coefficient in [0,1]
inline Rv random_mixing(Rng& rng, const FilteredSpace& sp) {
    return random_g_measurable(rng, sp, 0.0, 1.0);
}

// base plus one fresh draw per block, staying block-constant when base is
inline Rv bump_g_measurable(Rng& rng, const Rv& base, const FilteredSpace& sp, double lo,
                            double hi) {
    Rv out = base;
    for (int b = 0; b < sp.block_count(); ++b) {
        double d = rng.uniform(lo, hi);
        for (int a : sp.block_atoms(b)) out[a] += d;
    }
    return out;
}

inline GSet random_gset(Rng& rng, const FilteredSpace& sp) {
    return GSet{static_cast<std::uint32_t>(rng.next_u64() &
                                           GSet::full(sp.block_count()).mask)};
}

// Random space with n <= max_atoms and m <= max_blocks, every block nonempty,
// weights strictly positive summing to one exactly.
inline FilteredSpace random_space(Rng& rng, int max_atoms = 12, int max_blocks = 4) {
    int n = rng.uniform_int(2, max_atoms);
    int m = rng.uniform_int(1, std::min(max_blocks, n));
    std::vector<int> labels(n);
    for (int i = 0; i < m; ++i) labels[i] = i;
    for (int i = m; i < n; ++i) labels[i] = rng.uniform_int(0, m - 1);
    std::vector<double> w(n);
    double sum = 0.0;
    for (auto& v : w) {
        v = rng.uniform(0.2, 1.0);
        sum += v;
    }
    for (auto& v : w) v /= sum;
    double acc = 0.0;
    for (int i = 0; i + 1 < n; ++i) acc += w[i];
    w[n - 1] = 1.0 - acc;
    return FilteredSpace(std::move(w), labels);
}

}  // namespace riskdual
