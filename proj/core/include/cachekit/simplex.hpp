#pragma once

#include <vector>

#include "cachekit/rational.hpp"

namespace cachekit {

// min c.x  s.t.  A x = b, x >= 0, everything exact.
struct StandardLp {
    std::vector<std::vector<Rational>> a; // rows x cols
    std::vector<Rational> b;              // rows
    std::vector<Rational> c;              // cols
};

enum class LpStatus { optimal, infeasible, unbounded };

struct SimplexSolution {
    LpStatus status = LpStatus::optimal;
    Rational objective;
    std::vector<Rational> x;
    // Multipliers y with y.A = c_B B^-1 A restricted to the equality rows;
    // for a dual-form problem these are the primal variable values.
    std::vector<Rational> row_multipliers;
    long long pivots = 0;
};

// Two-phase primal simplex with Bland's rule: deterministic, terminating.
SimplexSolution solve_standard_lp(const StandardLp& lp);

} // namespace cachekit
