#include "riskdual/lp.hpp"

#include <cmath>
#include <cstddef>
#include <stdexcept>

namespace riskdual {

namespace {

template <class T>
struct Scalar;

template <>
struct Scalar<double> {
    static bool is_zero(double v) { return std::abs(v) <= 1e-9; }
    static bool is_neg(double v) { return v < -1e-9; }
    static bool is_pos(double v) { return v > 1e-9; }
};

template <>
struct Scalar<Rational> {
    static bool is_zero(const Rational& v) { return v == Rational(0); }
    static bool is_neg(const Rational& v) { return v < Rational(0); }
    static bool is_pos(const Rational& v) { return v > Rational(0); }
};

// Tableau simplex on the standard form min c.y, A y = b, y >= 0, b >= 0.
template <class T>
class Tableau {
  public:
    Tableau(std::vector<std::vector<T>> a, std::vector<T> b) : a_(std::move(a)), b_(std::move(b)) {
        m_ = static_cast<int>(a_.size());
        n_ = m_ ? static_cast<int>(a_[0].size()) : 0;
    }

    // returns false when infeasible
    bool phase1() {
        // append artificial columns, basis = artificials
        basis_.resize(m_);
        for (int i = 0; i < m_; ++i) {
            for (int j = 0; j < m_; ++j) a_[i].push_back(i == j ? T(1) : T(0));
            basis_[i] = n_ + i;
        }
        int total = n_ + m_;
        std::vector<T> cost(total, T(0));
        for (int i = 0; i < m_; ++i) cost[n_ + i] = T(1);
        run(cost, total);
        T art_sum(0);
        for (int i = 0; i < m_; ++i)
            if (basis_[i] >= n_) art_sum += b_[i];
        if (Scalar<T>::is_pos(art_sum)) return false;
        // drive basic artificials out where possible; redundant rows keep a
        // zero artificial basic, which is harmless for phase 2
        for (int i = 0; i < m_; ++i) {
            if (basis_[i] < n_) continue;
            for (int j = 0; j < n_; ++j) {
                if (!Scalar<T>::is_zero(a_[i][j])) {
                    pivot(i, j);
                    break;
                }
            }
        }
        // strip artificial columns that are not basic anywhere
        for (int i = 0; i < m_; ++i) a_[i].resize(n_ + m_);
        return true;
    }

    // returns false when unbounded
    bool phase2(const std::vector<T>& c) {
        std::vector<T> cost(n_ + m_, T(0));
        for (int j = 0; j < n_; ++j) cost[j] = c[j];
        // keep artificial columns pinned: a huge direct cost is unnecessary
        // because reduced-cost screening below skips them entirely
        return run(cost, n_, /*skip_from=*/n_);
    }

    const std::vector<int>& basis() const { return basis_; }
    const std::vector<T>& rhs() const { return b_; }
    int n() const { return n_; }

  private:
    void pivot(int row, int col) {
        T p = a_[row][col];
        for (auto& v : a_[row]) v = v / p;
        b_[row] = b_[row] / p;
        for (int i = 0; i < m_; ++i) {
            if (i == row) continue;
            T f = a_[i][col];
            if (Scalar<T>::is_zero(f)) continue;
            for (std::size_t j = 0; j < a_[i].size(); ++j) a_[i][j] = a_[i][j] - f * a_[row][j];
            b_[i] = b_[i] - f * b_[row];
        }
        basis_[row] = col;
    }

    // Bland's rule; returns false on unboundedness.
    bool run(const std::vector<T>& cost, int cols, int skip_from = -1) {
        const int guard = 50000;
        for (int iter = 0; iter < guard; ++iter) {
            // reduced costs r_j = c_j - c_B . column_j
            int enter = -1;
            for (int j = 0; j < cols; ++j) {
                if (skip_from >= 0 && j >= skip_from) continue;
                bool basic = false;
                for (int i = 0; i < m_; ++i)
                    if (basis_[i] == j) { basic = true; break; }
                if (basic) continue;
                T r = cost[j];
                for (int i = 0; i < m_; ++i) {
                    const T& cb = cost[basis_[i]];
                    if (!Scalar<T>::is_zero(cb)) r = r - cb * a_[i][j];
                }
                if (Scalar<T>::is_neg(r)) { enter = j; break; }
            }
            if (enter < 0) return true;  // optimal
            int leave = -1;
            T best(0);
            for (int i = 0; i < m_; ++i) {
                if (!Scalar<T>::is_pos(a_[i][enter])) continue;
                T ratio = b_[i] / a_[i][enter];
                if (leave < 0 || ratio < best ||
                    (!Scalar<T>::is_pos(ratio - best) && !Scalar<T>::is_neg(ratio - best) &&
                     basis_[i] < basis_[leave])) {
                    leave = i;
                    best = ratio;
                }
            }
            if (leave < 0) return false;  // unbounded
            pivot(leave, enter);
        }
        throw std::runtime_error("simplex: iteration guard exceeded");
    }

    int m_ = 0, n_ = 0;
    std::vector<std::vector<T>> a_;
    std::vector<T> b_;
    std::vector<int> basis_;
};

template <class T>
BasicLpResult<T> solve_impl(const BasicLinearProgram<T>& lp) {
    // standard-form conversion: free variables split, slack per inequality
    const int n = lp.n_vars;
    for (const auto& row : lp.rows)
        if (static_cast<int>(row.coeffs.size()) != n)
            throw std::invalid_argument("lp: row width mismatch");

    std::vector<int> pos_col(n), neg_col(n, -1);
    int cols = 0;
    for (int j = 0; j < n; ++j) {
        pos_col[j] = cols++;
        if (!lp.nonnegative[j]) neg_col[j] = cols++;
    }
    const int m = static_cast<int>(lp.rows.size());
    int slack_cols = 0;
    for (const auto& row : lp.rows)
        if (row.rel != LpRel::eq) ++slack_cols;

    std::vector<std::vector<T>> a(m, std::vector<T>(cols + slack_cols, T(0)));
    std::vector<T> b(m, T(0));
    int slack_at = cols;
    for (int i = 0; i < m; ++i) {
        const auto& row = lp.rows[i];
        for (int j = 0; j < n; ++j) {
            a[i][pos_col[j]] = row.coeffs[j];
            if (neg_col[j] >= 0) a[i][neg_col[j]] = -row.coeffs[j];
        }
        b[i] = row.rhs;
        if (row.rel == LpRel::le) a[i][slack_at++] = T(1);
        else if (row.rel == LpRel::ge) a[i][slack_at++] = T(-1);
        if (Scalar<T>::is_neg(b[i])) {
            for (auto& v : a[i]) v = -v;
            b[i] = -b[i];
        }
    }

    std::vector<T> c(cols + slack_cols, T(0));
    for (int j = 0; j < n; ++j) {
        T cj = lp.objective[j];
        if (lp.maximize) cj = -cj;
        c[pos_col[j]] = cj;
        if (neg_col[j] >= 0) c[neg_col[j]] = -cj;
    }

    Tableau<T> tab(std::move(a), std::move(b));
    BasicLpResult<T> res;
    if (!tab.phase1()) {
        res.status = LpStatus::infeasible;
        return res;
    }
    if (!tab.phase2(c)) {
        res.status = LpStatus::unbounded;
        return res;
    }
    res.status = LpStatus::optimal;
    res.x.assign(n, T(0));
    // map standard-form solution back to user variables
    std::vector<T> y(tab.n(), T(0));
    for (int i = 0; i < static_cast<int>(tab.basis().size()); ++i)
        if (tab.basis()[i] < tab.n()) y[tab.basis()[i]] = tab.rhs()[i];
    for (int j = 0; j < n; ++j) {
        res.x[j] = y[pos_col[j]];
        if (neg_col[j] >= 0) res.x[j] = res.x[j] - y[neg_col[j]];
        res.objective += lp.objective[j] * res.x[j];
    }
    return res;
}

}  // namespace

LpResult solve_lp(const LinearProgram& lp) { return solve_impl(lp); }
LpResultExact solve_lp(const LinearProgramExact& lp) { return solve_impl(lp); }

}  // namespace riskdual
