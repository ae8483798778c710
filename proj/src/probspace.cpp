#include "riskdual/probspace.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace riskdual {

FilteredSpace::FilteredSpace(std::vector<double> weights, const std::vector<int>& block_of)
    : weights_(std::move(weights)) {
    const int n = static_cast<int>(weights_.size());
    if (n == 0) throw std::invalid_argument("space: needs at least one atom");
    if (static_cast<int>(block_of.size()) != n)
        throw std::invalid_argument("space: one block label per atom required");

    double sum = 0.0;
    for (double w : weights_) {
        if (!(w > 0.0) || !std::isfinite(w))
            throw std::invalid_argument("space: atom weights must be strictly positive");
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-12)
        throw std::invalid_argument("space: atom weights must sum to 1 (got " +
                                    std::to_string(sum) + ")");

    // relabel blocks densely, first appearance order
    std::map<int, int> relabel;
    block_of_.resize(n);
    for (int i = 0; i < n; ++i) {
        auto [it, inserted] = relabel.try_emplace(block_of[i], static_cast<int>(relabel.size()));
        block_of_[i] = it->second;
    }
    const int m = static_cast<int>(relabel.size());
    if (m > 32) throw std::invalid_argument("space: at most 32 blocks supported");

    blocks_.resize(m);
    block_prob_.assign(m, 0.0);
    for (int i = 0; i < n; ++i) {
        blocks_[block_of_[i]].push_back(i);
        block_prob_[block_of_[i]] += weights_[i];
    }
    cond_weights_.resize(n);
    for (int i = 0; i < n; ++i) cond_weights_[i] = weights_[i] / block_prob_[block_of_[i]];
}

FilteredSpace FilteredSpace::uniform(const std::vector<int>& block_sizes) {
    int n = 0;
    for (int s : block_sizes) {
        if (s <= 0) throw std::invalid_argument("space: block sizes must be positive");
        n += s;
    }
    std::vector<double> w(n, 1.0 / n);
    // make the sum land exactly on 1
    double acc = 0.0;
    for (int i = 0; i + 1 < n; ++i) acc += w[i];
    w[n - 1] = 1.0 - acc;
    std::vector<int> labels;
    labels.reserve(n);
    for (int b = 0; b < static_cast<int>(block_sizes.size()); ++b)
        for (int k = 0; k < block_sizes[b]; ++k) labels.push_back(b);
    return FilteredSpace(std::move(w), labels);
}

void validate_rv(const Rv& x, const FilteredSpace& sp, bool require_finite) {
    if (static_cast<int>(x.size()) != sp.atom_count())
        throw std::invalid_argument("rv: one value per atom required");
    for (double v : x) {
        ext::check_valid(v);
        if (require_finite && !std::isfinite(v))
            throw std::invalid_argument("rv: finite values required here");
    }
}

Rv conditional_expectation(const Rv& x, const FilteredSpace& sp, CondExpFlags* flags) {
    validate_rv(x, sp);
    Rv out(sp.atom_count());
    for (int b = 0; b < sp.block_count(); ++b) {
        bool has_pinf = false, has_minf = false;
        double finite_sum = 0.0;
        for (int a : sp.block_atoms(b)) {
            if (ext::is_pinf(x[a])) has_pinf = true;
            else if (ext::is_minf(x[a])) has_minf = true;
            else finite_sum += sp.cond_weight(a) * x[a];
        }
        double v;
        if (has_pinf && has_minf) {
            // cancellation convention: the two infinite contributions sum to 0
            v = finite_sum;
            if (flags) flags->mixed_infinity_blocks.push_back(b);
        } else if (has_pinf) {
            v = ext::inf;
        } else if (has_minf) {
            v = -ext::inf;
        } else {
            v = finite_sum;
        }
        for (int a : sp.block_atoms(b)) out[a] = v;
    }
    return out;
}

std::vector<Rational> conditional_expectation_exact(const std::vector<Rational>& x,
                                                    const std::vector<Rational>& weights,
                                                    const std::vector<int>& block_of) {
    if (x.size() != weights.size() || x.size() != block_of.size())
        throw std::invalid_argument("exact projection: size mismatch");
    std::map<int, Rational> num, den;
    for (std::size_t i = 0; i < x.size(); ++i) {
        num[block_of[i]] += weights[i] * x[i];
        den[block_of[i]] += weights[i];
    }
    std::vector<Rational> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = num[block_of[i]] / den[block_of[i]];
    return out;
}

Rv conditional_p_norm(const Rv& x, const FilteredSpace& sp, double p) {
    validate_rv(x, sp, /*require_finite=*/true);
    if (std::isnan(p) || p < 1.0)
        throw std::invalid_argument("conditional p-norm: p must lie in [1, inf]");
    Rv out(sp.atom_count());
    for (int b = 0; b < sp.block_count(); ++b) {
        double v = 0.0;
        if (ext::is_pinf(p)) {
            for (int a : sp.block_atoms(b)) v = std::max(v, std::abs(x[a]));
        } else {
            for (int a : sp.block_atoms(b)) v += sp.cond_weight(a) * std::pow(std::abs(x[a]), p);
            v = std::pow(v, 1.0 / p);
        }
        for (int a : sp.block_atoms(b)) out[a] = v;
    }
    return out;
}

double expectation(const Rv& x, const FilteredSpace& sp) {
    validate_rv(x, sp);
    bool has_pinf = false, has_minf = false;
    double s = 0.0;
    for (int a = 0; a < sp.atom_count(); ++a) {
        if (ext::is_pinf(x[a])) has_pinf = true;
        else if (ext::is_minf(x[a])) has_minf = true;
        else s += sp.weight(a) * x[a];
    }
    if (has_pinf && has_minf) return s;
    if (has_pinf) return ext::inf;
    if (has_minf) return -ext::inf;
    return s;
}

Rv paste(const std::vector<Rv>& xs, const std::vector<GSet>& parts, const FilteredSpace& sp) {
    if (xs.size() != parts.size())
        throw std::invalid_argument("paste: one part per variable required");
    GSet seen = GSet::empty();
    for (const GSet& g : parts) {
        if (!seen.intersect(g).empty_set()) throw std::invalid_argument("paste: parts overlap");
        seen = seen.unite(g);
    }
    if (!(seen == sp.all_blocks())) throw std::invalid_argument("paste: parts do not cover");
    Rv out(sp.atom_count());
    for (std::size_t k = 0; k < xs.size(); ++k) {
        validate_rv(xs[k], sp);
        for (int b = 0; b < sp.block_count(); ++b)
            if (parts[k].contains(b))
                for (int a : sp.block_atoms(b)) out[a] = xs[k][a];
    }
    return out;
}

bool is_g_measurable(const Rv& x, const FilteredSpace& sp) {
    validate_rv(x, sp);
    for (int b = 0; b < sp.block_count(); ++b) {
        const auto& atoms = sp.block_atoms(b);
        for (std::size_t i = 1; i < atoms.size(); ++i)
            if (x[atoms[i]] != x[atoms[0]]) return false;
    }
    return true;
}

Rv restrict_to(const Rv& x, GSet a, const FilteredSpace& sp) {
    validate_rv(x, sp);
    Rv out(sp.atom_count(), 0.0);
    for (int b = 0; b < sp.block_count(); ++b)
        if (a.contains(b))
            for (int at : sp.block_atoms(b)) out[at] = x[at];
    return out;
}

Rv from_block_values(const std::vector<double>& per_block, const FilteredSpace& sp) {
    if (static_cast<int>(per_block.size()) != sp.block_count())
        throw std::invalid_argument("from_block_values: one value per block required");
    Rv out(sp.atom_count());
    for (int a = 0; a < sp.atom_count(); ++a) out[a] = per_block[sp.block_of(a)];
    return out;
}

std::vector<double> block_values(const Rv& x, const FilteredSpace& sp) {
    validate_rv(x, sp);
    std::vector<double> out(sp.block_count());
    for (int b = 0; b < sp.block_count(); ++b) out[b] = x[sp.block_atoms(b)[0]];
    return out;
}

}  // namespace riskdual
