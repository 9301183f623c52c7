#include <doctest.h>

#include <random>

#include "cachekit/bounds.hpp"

using namespace cachekit;

TEST_CASE("theorem 1 bound")
{
    LinearBound b = theorem1_bound(make_config(3, 4));
    CHECK(b.m_coeff == 8);
    CHECK(b.r_coeff == 4);
    CHECK(b.rhs == 11); // the (3,4) lemma, unscaled
    LinearBound b44 = theorem1_bound(make_config(4, 4));
    CHECK(b44.m_coeff == 12);
    CHECK(b44.rhs == 15);
    LinearBound b46 = theorem1_bound(make_config(4, 6));
    CHECK(b46.m_coeff == 18);
    CHECK(b46.r_coeff == 6);
    CHECK(b46.rhs == 23);
    CHECK_THROWS_AS(theorem1_bound(make_config(2, 4)), DomainError);
}

TEST_CASE("theorem 2 bound")
{
    LinearBound b = theorem2_bound(make_config(2, 4));
    CHECK(b.m_coeff == 8);
    CHECK(b.r_coeff == 6);
    CHECK(b.rhs == 11); // the (2,4) lemma
    LinearBound b25 = theorem2_bound(make_config(2, 5));
    CHECK(b25.m_coeff == 15);
    CHECK(b25.r_coeff == 10);
    CHECK(b25.rhs == 19);
    // N=1 evaluates with a positive R coefficient
    LinearBound b13 = theorem2_bound(make_config(1, 3));
    CHECK(b13.r_coeff > 0);
    CHECK_THROWS_AS(theorem2_bound(make_config(3, 4)), DomainError);
    // at the odd-K boundary the two formulas coincide
    for (int n = 2; n <= 6; ++n) {
        NetworkConfig cfg = make_config(n, 2 * n - 1);
        LinearBound t1 = theorem1_bound(cfg);
        LinearBound t2 = theorem2_bound(cfg, true);
        CHECK(t1.m_coeff == t2.m_coeff);
        CHECK(t1.r_coeff == t2.r_coeff);
        CHECK(t1.rhs == t2.rhs);
    }
}

TEST_CASE("cut-set bounds")
{
    auto cuts = cutset_bounds(make_config(3, 4));
    REQUIRE(cuts.size() == 3);
    CHECK(lower_envelope(cuts, rat(3, 8)) == rat(15, 8)); // s=3 dominates
    auto cuts24 = cutset_bounds(make_config(2, 4));
    CHECK(lower_envelope(cuts24, rat(0)) == 2); // s=2 with empty caches
    // at M = N/(K(N-1)) the best cut equals N - N^2/((N-1)K); the one
    // exception is (2,2), where that memory point sits at N/K and the s=1
    // cut takes over.
    for (int k = 2; k <= 12; ++k)
        for (int n = 2; n <= k; ++n) {
            if (n == 2 && k == 2)
                continue;
            NetworkConfig cfg = make_config(n, k);
            Rational m = rat(n) / rat((long long)k * (n - 1));
            Rational expected = rat(n) - rat((long long)n * n) / rat((long long)(n - 1) * k);
            CHECK(lower_envelope(cutset_bounds(cfg), m) == expected);
        }
}

TEST_CASE("lower_envelope matches a brute-force maximum on random bound sets")
{
    std::mt19937 rng(424242);
    std::uniform_int_distribution<int> coef(1, 40);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<LinearBound> bounds;
        int count = 1 + trial % 7;
        for (int i = 0; i < count; ++i)
            bounds.push_back(LinearBound{rat(coef(rng), coef(rng)), rat(coef(rng), 8),
                                         rat(coef(rng) - 20, coef(rng)), "random"});
        Rational m = rat(coef(rng), coef(rng));
        Rational best = bounds[0].value_at(m);
        for (auto& b : bounds) {
            Rational v = (b.rhs - b.m_coeff * m) / b.r_coeff;
            if (v > best)
                best = v;
        }
        CHECK(lower_envelope(bounds, m) == best);
    }
    CHECK(lower_envelope({theorem1_bound(make_config(3, 4))}, rat(3, 8)) == 2);
}

TEST_CASE("achievable curves reproduce the paper's endpoints")
{
    auto curves34 = achievable_curves(make_config(3, 4));
    const TradeoffCurve* line = nullptr;
    const TradeoffCurve* yu = nullptr;
    for (auto& c : curves34) {
        if (c.name == "coded_placement_line")
            line = &c;
        if (c.name == "yu")
            yu = &c;
    }
    REQUIRE(line);
    CHECK(line->breakpoints.front() == std::pair<Rational, Rational>{rat(1, 4), rat(9, 4)});
    CHECK(line->breakpoints.back() == std::pair<Rational, Rational>{rat(3, 8), rat(2)});
    CHECK(line->exact_for_case_one);
    REQUIRE(yu);
    std::vector<std::pair<Rational, Rational>> expected_yu{
        {rat(0), rat(3)},      {rat(3, 4), rat(3, 2)}, {rat(3, 2), rat(2, 3)},
        {rat(9, 4), rat(1, 4)}, {rat(3), rat(0)}};
    CHECK(yu->breakpoints == expected_yu);

    // (2,4): the known achievable value at M = 1/2 is 11/9
    TradeoffCurve env24 = achievable_envelope(make_config(2, 4));
    CHECK(env24.value_at(rat(1, 2)) == rat(11, 9));
    CHECK(env24.value_at(rat(1, 4)) == rat(3, 2));
}

TEST_CASE("every tradeoff curve is convex and non-increasing")
{
    for (int k = 1; k <= 8; ++k)
        for (int n = 1; n <= k; ++n) {
            auto curves = achievable_curves(make_config(n, k));
            curves.push_back(achievable_envelope(make_config(n, k)));
            for (auto& c : curves) {
                for (std::size_t i = 0; i + 1 < c.breakpoints.size(); ++i) {
                    CHECK(c.breakpoints[i].first < c.breakpoints[i + 1].first);
                    CHECK(c.breakpoints[i].second >= c.breakpoints[i + 1].second);
                }
                for (std::size_t i = 0; i + 2 < c.breakpoints.size(); ++i) {
                    // slopes non-decreasing (convexity)
                    auto& [m0, r0] = c.breakpoints[i];
                    auto& [m1, r1] = c.breakpoints[i + 1];
                    auto& [m2, r2] = c.breakpoints[i + 2];
                    CHECK((r1 - r0) * (m2 - m1) <= (r2 - r1) * (m1 - m0));
                }
            }
        }
}

TEST_CASE("exact segments for (3,4)")
{
    auto segments = exact_segments(make_config(3, 4));
    bool found = false;
    for (auto& s : segments) {
        if (s.m_lo == rat(1, 4) && s.m_hi == rat(3, 8)) {
            found = true;
            CHECK(s.exact);
            CHECK(s.lower.slope == -2);
            CHECK(s.lower.intercept == rat(11, 4));
            CHECK(s.lower.origin == "theorem1");
        }
    }
    CHECK(found);
    // chen exact on [0, 1/K] and the MN tail exact on [N(K-1)/K, N]
    CHECK(segments.front().m_lo == 0);
    CHECK(segments.front().exact);
    CHECK(segments.front().lower.slope == -3);
    CHECK(segments.front().lower.intercept == 3);
    CHECK(segments.back().m_hi == 3);
    CHECK(segments.back().exact);
    CHECK(segments.back().lower.slope == rat(-1, 3));
    CHECK(segments.back().lower.intercept == 1);
}

TEST_CASE("gap bracket for (2,4) matches the paper's two lines")
{
    // The bracket on [1/4, 1/2] is the theorem-2 line against the achievable
    // chord 32/18 - 10M/9; the maximal segment holding it runs to M=1.
    auto segments = exact_segments(make_config(2, 4));
    bool found = false;
    for (auto& s : segments) {
        if (s.m_lo == rat(1, 4) && s.m_hi >= rat(1, 2)) {
            found = true;
            CHECK_FALSE(s.exact);
            CHECK(s.lower.slope == rat(-4, 3));
            CHECK(s.lower.intercept == rat(11, 6));
            CHECK(s.lower.origin == "theorem2");
            CHECK(s.upper.slope == rat(-10, 9));
            CHECK(s.upper.intercept == rat(32, 18));
            CHECK(s.lower.value_at(rat(1, 2)) == rat(7, 6));
            CHECK(s.upper.value_at(rat(1, 2)) == rat(11, 9));
        }
    }
    CHECK(found);
}

TEST_CASE("theorem 1 line equals the coded-placement line on its interval")
{
    for (int k = 2; k <= 10; ++k)
        for (int n = (k + 2) / 2; n <= k; ++n) {
            if (n < 2)
                continue;
            NetworkConfig cfg = make_config(n, k);
            LinearBound t1 = theorem1_bound(cfg);
            Rational lo = rat(1, k);
            Rational hi = rat(n) / rat((long long)k * (n - 1));
            for (Rational m : {lo, Rational((lo + hi) / 2), hi}) {
                Rational line = rat((long long)k * n - 1, k) - rat(n - 1) * m;
                CHECK(t1.value_at(m) == line);
            }
        }
}

TEST_CASE("comparison table rows")
{
    ComparisonRow row34 = comparison_table_row(make_config(3, 4));
    CHECK(row34.m == rat(3, 8));
    CHECK(row34.applicable_case == CaseTag::one);
    CHECK(row34.value("new_lower_bound") == 2);
    CHECK(row34.value("cut_set") == rat(15, 8));
    CHECK(row34.value("sengupta") == rat(15, 8) + rat(1, 8) * rat(1, 3));

    ComparisonRow row24 = comparison_table_row(make_config(2, 4));
    CHECK(row24.applicable_case == CaseTag::two);
    CHECK(row24.value("new_lower_bound") == rat(7, 6));
    CHECK(row24.value("cut_set") == 1);

    CHECK_THROWS_AS(comparison_table_row(make_config(1, 3)), DomainError);

    for (int k = 2; k <= 12; ++k)
        for (int n = 2; n <= k; ++n) {
            NetworkConfig cfg = make_config(n, k);
            ComparisonRow row = comparison_table_row(cfg);
            CHECK(row.value("new_lower_bound") > row.value("cut_set"));
            if (row.applicable_case == CaseTag::one)
                CHECK(row.value("new_lower_bound") - row.value("cut_set") ==
                      rat(1) / rat((long long)k * (n - 1)));
        }
}

TEST_CASE("comparison row matches the applicable theorem at its memory point")
{
    for (int k = 2; k <= 12; ++k)
        for (int n = 2; n <= k; ++n) {
            NetworkConfig cfg = make_config(n, k);
            ComparisonRow row = comparison_table_row(cfg);
            LinearBound theorem = row.applicable_case == CaseTag::one
                                      ? theorem1_bound(cfg)
                                      : theorem2_bound(cfg);
            CHECK(theorem.value_at(row.m) == row.value("new_lower_bound"));
        }
}

TEST_CASE("bounds never exceed achievability, with equality on exact segments")
{
    for (int k = 1; k <= 8; ++k)
        for (int n = 1; n <= k; ++n) {
            NetworkConfig cfg = make_config(n, k);
            auto bounds = all_bounds(cfg);
            TradeoffCurve env = achievable_envelope(cfg);
            auto segments = exact_segments(cfg);
            for (Rational m = 0; m <= rat(n); m += rat(1, 4 * k)) {
                Rational lo = lower_envelope(bounds, m);
                Rational hi = env.value_at(m);
                CHECK(lo <= hi);
                bool in_exact = false;
                for (auto& s : segments)
                    if (m >= s.m_lo && m <= s.m_hi && s.exact)
                        in_exact = true;
                if (in_exact)
                    CHECK(lo == hi);
                else
                    CHECK(lo < hi);
            }
        }
}
