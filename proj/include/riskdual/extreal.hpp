#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

// Extended-real scalar helpers. Values live in ordinary doubles; +inf and
// -inf are legal, NaN is not. The one non-standard rule: (+inf) + (-inf) = 0.
// Every other indeterminate form (0 * inf, inf / inf, x / 0) throws.

namespace riskdual::ext {

constexpr double inf = std::numeric_limits<double>::infinity();

inline bool is_pinf(double x) { return x == inf; }
inline bool is_minf(double x) { return x == -inf; }
inline bool is_finite(double x) { return std::isfinite(x); }

inline void check_valid(double x) {
    if (std::isnan(x)) throw std::domain_error("extended real: NaN is not a value");
}

// Addition with the cancellation convention (+inf) + (-inf) = 0.
inline double add(double a, double b) {
    check_valid(a);
    check_valid(b);
    if ((is_pinf(a) && is_minf(b)) || (is_minf(a) && is_pinf(b))) return 0.0;
    return a + b;
}

inline double sub(double a, double b) { return add(a, -b); }

// Multiplication; 0 * inf is an error, finite scaling keeps the sign.
inline double mul(double a, double b) {
    check_valid(a);
    check_valid(b);
    if ((a == 0.0 && !is_finite(b)) || (b == 0.0 && !is_finite(a)))
        throw std::domain_error("extended real: 0 * inf is indeterminate");
    return a * b;
}

inline double div(double a, double b) {
    check_valid(a);
    check_valid(b);
    if (b == 0.0) throw std::domain_error("extended real: division by zero");
    if (!is_finite(a) && !is_finite(b))
        throw std::domain_error("extended real: inf / inf is indeterminate");
    return a / b;
}

// abs gap used by approximate comparisons: equal infinities count as 0 gap.
inline double gap(double a, double b) {
    check_valid(a);
    check_valid(b);
    if (!is_finite(a) || !is_finite(b)) return (a == b) ? 0.0 : inf;
    return std::abs(a - b);
}

// a <= b + tol with extended semantics.
inline bool le(double a, double b, double tol = 0.0) {
    check_valid(a);
    check_valid(b);
    if (a == -inf || b == inf) return true;
    if (a == inf || b == -inf) return false;
    return a <= b + tol;
}

}  // namespace riskdual::ext
