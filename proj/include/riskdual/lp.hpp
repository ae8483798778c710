#pragma once

#include <vector>

#include "riskdual/rational.hpp"

// Dense two-phase simplex with Bland's rule. Self-contained on purpose: every
// separation certificate in this project must be reproducible bit for bit,
// and the instances are tiny. The same implementation runs in double or exact
// rational arithmetic.

namespace riskdual {

enum class LpStatus { optimal, infeasible, unbounded };

enum class LpRel { le, ge, eq };

template <class T>
struct LpRow {
    std::vector<T> coeffs;  // dense, one per variable
    LpRel rel;
    T rhs;
};

template <class T>
struct BasicLinearProgram {
    int n_vars = 0;
    bool maximize = false;
    std::vector<T> objective;        // one per variable
    std::vector<bool> nonnegative;   // per variable; false = free
    std::vector<LpRow<T>> rows;

    explicit BasicLinearProgram(int n)
        : n_vars(n), objective(n, T(0)), nonnegative(n, false) {}

    void add_row(std::vector<T> coeffs, LpRel rel, T rhs) {
        rows.push_back(LpRow<T>{std::move(coeffs), rel, rhs});
    }
};

template <class T>
struct BasicLpResult {
    LpStatus status = LpStatus::infeasible;
    std::vector<T> x;  // user variables, valid when optimal
    T objective = T(0);
};

using LinearProgram = BasicLinearProgram<double>;
using LpResult = BasicLpResult<double>;
using LinearProgramExact = BasicLinearProgram<Rational>;
using LpResultExact = BasicLpResult<Rational>;

LpResult solve_lp(const LinearProgram& lp);
LpResultExact solve_lp(const LinearProgramExact& lp);

}  // namespace riskdual
