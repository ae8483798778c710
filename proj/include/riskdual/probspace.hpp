#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "riskdual/extreal.hpp"
#include "riskdual/rational.hpp"

namespace riskdual {

// A random variable is one extended-real value per atom.
using Rv = std::vector<double>;

class FilteredSpace;

// A union of blocks of the finer-partition-refining sub-partition; the only
// measurable sets the conditional layer ever sees. Stored as a block bitmask.
struct GSet {
    std::uint32_t mask = 0;

    static GSet empty() { return GSet{0}; }
    static GSet full(int block_count) {
        return GSet{block_count >= 32 ? ~0u : ((1u << block_count) - 1u)};
    }
    static GSet single(int block) { return GSet{1u << block}; }

    bool contains(int block) const { return (mask >> block) & 1u; }
    GSet complement(int block_count) const { return GSet{full(block_count).mask & ~mask}; }
    GSet unite(GSet o) const { return GSet{mask | o.mask}; }
    GSet intersect(GSet o) const { return GSet{mask & o.mask}; }
    bool empty_set() const { return mask == 0; }
    bool operator==(const GSet& o) const { return mask == o.mask; }
};

// Finite probability space with strictly positive atom weights plus a
// partition of the atoms into blocks; the blocks generate the coarse
// sigma-algebra, so measurability is structural (constant per block).
class FilteredSpace {
  public:
    // weights must be > 0 and sum to 1 within 1e-12; block_of maps each atom
    // to a block label (any integers; relabelled densely in first-seen order).
    FilteredSpace(std::vector<double> weights, const std::vector<int>& block_of);

    // n equal-weight atoms split into consecutive blocks of the given sizes.
    static FilteredSpace uniform(const std::vector<int>& block_sizes);

    int atom_count() const { return static_cast<int>(weights_.size()); }
    int block_count() const { return static_cast<int>(blocks_.size()); }
    double weight(int atom) const { return weights_[atom]; }
    const std::vector<double>& weights() const { return weights_; }
    int block_of(int atom) const { return block_of_[atom]; }
    const std::vector<int>& block_atoms(int block) const { return blocks_[block]; }
    double block_prob(int block) const { return block_prob_[block]; }
    // weight(atom) / block_prob(block): the conditional weight within its block
    double cond_weight(int atom) const { return cond_weights_[atom]; }

    GSet all_blocks() const { return GSet::full(block_count()); }

  private:
    std::vector<double> weights_;
    std::vector<int> block_of_;
    std::vector<std::vector<int>> blocks_;
    std::vector<double> block_prob_;
    std::vector<double> cond_weights_;
};

struct CondExpFlags {
    // blocks where +inf and -inf met and the cancellation convention fired
    std::vector<int> mixed_infinity_blocks;
};

// Blockwise weight-normalized average; +inf/-inf propagate per block, a mixed
// block falls back to the cancellation convention and is flagged.
Rv conditional_expectation(const Rv& x, const FilteredSpace& sp, CondExpFlags* flags = nullptr);

// Same projection in exact arithmetic (finite inputs as rationals).
std::vector<Rational> conditional_expectation_exact(const std::vector<Rational>& x,
                                                    const std::vector<Rational>& weights,
                                                    const std::vector<int>& block_of);

// Blockwise p-mean of |x| for p in [1, inf]; pass p = ext::inf for the
// blockwise maximum. Input must be finite-valued.
Rv conditional_p_norm(const Rv& x, const FilteredSpace& sp, double p);

double expectation(const Rv& x, const FilteredSpace& sp);

// Concatenation over a disjoint cover: result takes part k's values on
// parts[k]. Throws if the parts overlap or fail to cover all blocks.
Rv paste(const std::vector<Rv>& xs, const std::vector<GSet>& parts, const FilteredSpace& sp);

bool is_g_measurable(const Rv& x, const FilteredSpace& sp);

// x * 1_A (zero off A); values on A are kept verbatim, so +-inf survive.
Rv restrict_to(const Rv& x, GSet a, const FilteredSpace& sp);

// Expand one value per block to one value per atom.
Rv from_block_values(const std::vector<double>& per_block, const FilteredSpace& sp);

// Read off the (constant) value of a g-measurable variable on each block.
std::vector<double> block_values(const Rv& x, const FilteredSpace& sp);

void validate_rv(const Rv& x, const FilteredSpace& sp, bool require_finite = false);

}  // namespace riskdual
