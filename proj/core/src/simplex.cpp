#include "cachekit/simplex.hpp"

#include <algorithm>

namespace cachekit {

namespace {

class Tableau {
public:
    Tableau(const StandardLp& lp)
        : rows_(lp.b.size()), structural_(lp.c.size()), cols_(structural_ + rows_)
    {
        // [A | I] with b >= 0; remember flipped rows for dual extraction.
        sign_.assign(rows_, 1);
        a_.assign(rows_, std::vector<Rational>(cols_ + 1));
        basis_.resize(rows_);
        for (std::size_t i = 0; i < rows_; ++i) {
            int s = lp.b[i] < 0 ? -1 : 1;
            sign_[i] = s;
            for (std::size_t j = 0; j < structural_; ++j)
                a_[i][j] = s < 0 ? Rational(-lp.a[i][j]) : lp.a[i][j];
            a_[i][structural_ + i] = 1;
            a_[i][cols_] = s < 0 ? Rational(-lp.b[i]) : lp.b[i];
            basis_[i] = structural_ + i;
        }
    }

    // Phase 1: minimize the sum of artificials.
    bool run_phase1(long long& pivots)
    {
        obj_.assign(cols_ + 1, Rational(0));
        for (std::size_t j = 0; j < structural_; ++j) {
            Rational sum = 0;
            for (std::size_t i = 0; i < rows_; ++i)
                sum += a_[i][j];
            obj_[j] = -sum; // reduced cost c_j - z_j with c_j = 0
        }
        Rational rhs_sum = 0;
        for (std::size_t i = 0; i < rows_; ++i)
            rhs_sum += a_[i][cols_];
        obj_[cols_] = -rhs_sum;
        artificial_allowed_ = true;
        iterate(pivots);
        if (obj_[cols_] != 0)
            return false; // infeasible: artificials stuck positive
        pin_basic_artificials(pivots);
        return true;
    }

    // Phase 2 over the original costs; artificials may not re-enter.
    LpStatus run_phase2(const std::vector<Rational>& cost, long long& pivots)
    {
        obj_.assign(cols_ + 1, Rational(0));
        for (std::size_t j = 0; j < structural_; ++j)
            obj_[j] = cost[j];
        for (std::size_t i = 0; i < rows_; ++i) {
            if (basis_[i] >= structural_)
                continue;
            Rational factor = obj_[basis_[i]];
            if (factor == 0)
                continue;
            for (std::size_t j = 0; j <= cols_; ++j)
                obj_[j] -= factor * a_[i][j];
        }
        artificial_allowed_ = false;
        return iterate(pivots);
    }

    Rational objective() const { return -obj_[cols_]; }

    std::vector<Rational> solution(std::size_t n) const
    {
        std::vector<Rational> x(n, Rational(0));
        for (std::size_t i = 0; i < rows_; ++i)
            if (basis_[i] < n)
                x[basis_[i]] = a_[i][cols_];
        return x;
    }

    // y_i = z-value of row i's artificial column, undoing the sign flip.
    std::vector<Rational> duals() const
    {
        std::vector<Rational> y(rows_);
        for (std::size_t i = 0; i < rows_; ++i) {
            Rational z = -obj_[structural_ + i];
            y[i] = sign_[i] < 0 ? Rational(-z) : z;
        }
        return y;
    }

private:
    LpStatus iterate(long long& pivots)
    {
        while (true) {
            // Bland: the lowest-indexed improving column.
            std::size_t enter = cols_;
            for (std::size_t j = 0; j < cols_; ++j) {
                if (!artificial_allowed_ && j >= structural_)
                    break;
                if (obj_[j] < 0) {
                    enter = j;
                    break;
                }
            }
            if (enter == cols_)
                return LpStatus::optimal;
            // Ratio test; ties resolved by the smallest basis index.
            std::size_t leave = rows_;
            Rational best_ratio = 0;
            for (std::size_t i = 0; i < rows_; ++i) {
                if (a_[i][enter] <= 0)
                    continue;
                Rational ratio = a_[i][cols_] / a_[i][enter];
                if (leave == rows_ || ratio < best_ratio ||
                    (ratio == best_ratio && basis_[i] < basis_[leave])) {
                    leave = i;
                    best_ratio = ratio;
                }
            }
            if (leave == rows_)
                return LpStatus::unbounded;
            pivot(leave, enter);
            ++pivots;
        }
    }

    void pivot(std::size_t row, std::size_t col)
    {
        Rational inv = a_[row][col];
        for (std::size_t j = 0; j <= cols_; ++j)
            if (a_[row][j] != 0)
                a_[row][j] /= inv;
        for (std::size_t i = 0; i < rows_; ++i) {
            if (i == row || a_[i][col] == 0)
                continue;
            Rational factor = a_[i][col];
            for (std::size_t j = 0; j <= cols_; ++j)
                if (a_[row][j] != 0)
                    a_[i][j] -= factor * a_[row][j];
        }
        if (obj_[col] != 0) {
            Rational factor = obj_[col];
            for (std::size_t j = 0; j <= cols_; ++j)
                if (a_[row][j] != 0)
                    obj_[j] -= factor * a_[row][j];
        }
        basis_[row] = col;
    }

    // Swap basic artificials at zero level for structural columns where
    // possible; rows with no structural entry are redundant and harmless.
    void pin_basic_artificials(long long& pivots)
    {
        for (std::size_t i = 0; i < rows_; ++i) {
            if (basis_[i] < structural_)
                continue;
            for (std::size_t j = 0; j < structural_; ++j) {
                if (a_[i][j] != 0) {
                    pivot(i, j);
                    ++pivots;
                    break;
                }
            }
        }
    }

    std::size_t rows_, structural_, cols_;
    std::vector<std::vector<Rational>> a_;
    std::vector<Rational> obj_;
    std::vector<std::size_t> basis_;
    std::vector<int> sign_;
    bool artificial_allowed_ = true;
};

} // namespace

SimplexSolution solve_standard_lp(const StandardLp& lp)
{
    if (lp.a.size() != lp.b.size())
        throw DomainError("simplex: row count mismatch");
    for (auto& row : lp.a)
        if (row.size() != lp.c.size())
            throw DomainError("simplex: column count mismatch");

    SimplexSolution out;
    Tableau tableau(lp);
    if (!tableau.run_phase1(out.pivots)) {
        out.status = LpStatus::infeasible;
        return out;
    }
    out.status = tableau.run_phase2(lp.c, out.pivots);
    if (out.status != LpStatus::optimal)
        return out;
    out.objective = tableau.objective();
    out.x = tableau.solution(lp.c.size());
    out.row_multipliers = tableau.duals();
    return out;
}

} // namespace cachekit
