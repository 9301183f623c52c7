#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cachekit/network.hpp"
#include "cachekit/rational.hpp"

namespace cachekit {

// a*M + b*R >= c with b > 0.
struct LinearBound {
    Rational m_coeff; // a
    Rational r_coeff; // b, positive
    Rational rhs;     // c
    std::string origin;

    // The implied R lower bound (c - a*m)/b.
    Rational value_at(const Rational& m) const;
    std::string to_json() const;
};

// K(N-1) M + K R >= KN-1, valid for ceil((K+1)/2) <= N <= K.
LinearBound theorem1_bound(const NetworkConfig& cfg, bool force = false);

// (K(N(K+3)-2(N^2+1))/2) M + (K(K+3-2N)/2) R >= (NK(K-2N+3)-2)/2,
// valid for 1 <= N < ceil((K+1)/2). With force the range check is skipped.
LinearBound theorem2_bound(const NetworkConfig& cfg, bool force = false);

// R >= s - s*M/floor(N/s) for s in 1..min(N,K).
std::vector<LinearBound> cutset_bounds(const NetworkConfig& cfg);

// Every bound valid for cfg: the applicable theorem plus the cut-set family.
// On the odd-K case boundary (K = 2N-1) theorem 2 coincides with theorem 1
// and is listed as well; on an even-K boundary its formula is not a valid
// bound and is omitted.
std::vector<LinearBound> all_bounds(const NetworkConfig& cfg);

// max over bounds of (c - a*m)/b; exact.
Rational lower_envelope(const std::vector<LinearBound>& bounds, const Rational& m);

// Piecewise-linear curve of achievable (M, R) points, convex and
// non-increasing over its domain.
struct TradeoffCurve {
    std::string name;
    std::vector<std::pair<Rational, Rational>> breakpoints; // sorted by M
    std::vector<std::string> segment_origin;                // size = breakpoints-1
    bool exact_for_case_one = false;

    Rational value_at(const Rational& m) const;
    std::string to_json() const;
};

// Chen segment, the coded-placement line (KN-1)/K - (N-1)M, the Yu et al.
// memory-sharing curve and the Maddah-Ali--Niesen tail.
std::vector<TradeoffCurve> achievable_curves(const NetworkConfig& cfg);

// Lower convex envelope of a point set evaluated at m; DomainError outside
// the hull's M-range.
Rational memory_share(const std::vector<std::pair<Rational, Rational>>& points,
                      const Rational& m);

// The lower convex envelope over every achievable curve's breakpoints.
TradeoffCurve achievable_envelope(const NetworkConfig& cfg);

// R = intercept + slope*M over one memory interval.
struct SegmentLine {
    Rational slope;
    Rational intercept;
    std::string origin;

    Rational value_at(const Rational& m) const { return intercept + slope * m; }
    bool operator==(const SegmentLine&) const = default;
};

struct Segment {
    Rational m_lo, m_hi;
    bool exact = false;
    SegmentLine lower; // best converse line on the interval
    SegmentLine upper; // best achievable line; equals lower when exact
    std::string to_json() const;
};

// Partition of [0, N] into maximal intervals on which both envelopes are a
// single line each; exact where the two coincide.
std::vector<Segment> exact_segments(const NetworkConfig& cfg);

// The evaluated comparison rows at M = N/(K(N-1)); rejects N = 1.
struct ComparisonRow {
    Rational m;
    CaseTag applicable_case;
    std::vector<std::pair<std::string, Rational>> values;
    std::string to_json() const;

    Rational value(const std::string& name) const;
};

ComparisonRow comparison_table_row(const NetworkConfig& cfg);

} // namespace cachekit
