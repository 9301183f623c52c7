#include "cachekit/bounds.hpp"

#include <algorithm>
#include <map>
#include <set>

#include <json.hpp>

namespace cachekit {

using nlohmann::json;

Rational LinearBound::value_at(const Rational& m) const
{
    return (rhs - m_coeff * m) / r_coeff;
}

std::string LinearBound::to_json() const
{
    json j;
    j["a"] = to_string(m_coeff);
    j["b"] = to_string(r_coeff);
    j["c"] = to_string(rhs);
    j["origin"] = origin;
    return j.dump();
}

LinearBound theorem1_bound(const NetworkConfig& cfg, bool force)
{
    const int n = cfg.n_files;
    const int k = cfg.n_users;
    if (!force && cfg.regime() != CaseTag::one)
        throw DomainError("theorem 1 needs ceil((K+1)/2) <= N <= K; (N,K)=(" +
                          std::to_string(n) + "," + std::to_string(k) + ") violates it");
    return LinearBound{rat(static_cast<long long>(k) * (n - 1)), rat(k),
                       rat(static_cast<long long>(k) * n - 1), "theorem1"};
}

LinearBound theorem2_bound(const NetworkConfig& cfg, bool force)
{
    const long long n = cfg.n_files;
    const long long k = cfg.n_users;
    if (!force && cfg.regime() != CaseTag::two)
        throw DomainError("theorem 2 needs 1 <= N < ceil((K+1)/2); (N,K)=(" +
                          std::to_string(cfg.n_files) + "," + std::to_string(cfg.n_users) +
                          ") violates it");
    Rational a = rat(k * (n * (k + 3) - 2 * (n * n + 1)), 2);
    Rational b = rat(k * (k + 3 - 2 * n), 2);
    Rational c = rat(n * k * (k - 2 * n + 3) - 2, 2);
    return LinearBound{a, b, c, "theorem2"};
}

std::vector<LinearBound> cutset_bounds(const NetworkConfig& cfg)
{
    std::vector<LinearBound> out;
    for (int s = 1; s <= std::min(cfg.n_files, cfg.n_users); ++s) {
        int parts = cfg.n_files / s;
        out.push_back(LinearBound{rat(s, parts), rat(1), rat(s),
                                  "cutset(" + std::to_string(s) + ")"});
    }
    return out;
}

std::vector<LinearBound> all_bounds(const NetworkConfig& cfg)
{
    std::vector<LinearBound> bounds;
    if (cfg.regime() == CaseTag::one) {
        bounds.push_back(theorem1_bound(cfg));
        // On the odd-K boundary (K = 2N-1) theorem 2's formula coincides with
        // theorem 1 and its demand construction exists; elsewhere on the
        // boundary it is not a valid bound.
        if (cfg.on_case_boundary() && cfg.n_users == 2 * cfg.n_files - 1)
            bounds.push_back(theorem2_bound(cfg, /*force=*/true));
    } else if (cfg.n_files >= 2) {
        // Theorem 2's derivation needs N >= 2; at N=1 the formula is not a
        // valid bound (the pair (M,R)=(N,0) violates it).
        bounds.push_back(theorem2_bound(cfg));
    }
    for (auto& b : cutset_bounds(cfg))
        bounds.push_back(std::move(b));
    return bounds;
}

Rational lower_envelope(const std::vector<LinearBound>& bounds, const Rational& m)
{
    if (bounds.empty())
        throw DomainError("lower_envelope over empty bound set");
    Rational best = bounds.front().value_at(m);
    for (std::size_t i = 1; i < bounds.size(); ++i)
        best = std::max(best, Rational(bounds[i].value_at(m)));
    return best;
}

Rational TradeoffCurve::value_at(const Rational& m) const
{
    return memory_share(breakpoints, m);
}

std::string TradeoffCurve::to_json() const
{
    json j;
    j["name"] = name;
    j["exact_for_case_one"] = exact_for_case_one;
    json pts = json::array();
    for (auto& [m, r] : breakpoints)
        pts.push_back({to_string(m), to_string(r)});
    j["breakpoints"] = pts;
    j["segment_origin"] = segment_origin;
    return j.dump();
}

std::vector<TradeoffCurve> achievable_curves(const NetworkConfig& cfg)
{
    const int n = cfg.n_files;
    const int k = cfg.n_users;
    std::vector<TradeoffCurve> out;

    TradeoffCurve chen;
    chen.name = "chen";
    chen.breakpoints = {{rat(0), rat(n)}, {rat(1, k), rat(n) - rat(n, k)}};
    chen.segment_origin = {"chen"};
    out.push_back(std::move(chen));

    if (n >= 2) {
        // R = (KN-1)/K - (N-1)M on [1/K, N/(K(N-1))]; achievable for every
        // N <= K, optimal only in case I.
        TradeoffCurve line;
        line.name = "coded_placement_line";
        line.exact_for_case_one = true;
        Rational m0 = rat(1, k);
        Rational m1 = rat(n) / rat(static_cast<long long>(k) * (n - 1));
        auto value = [&](const Rational& m) {
            return rat(static_cast<long long>(k) * n - 1, k) - rat(n - 1) * m;
        };
        line.breakpoints = {{m0, value(m0)}, {m1, value(m1)}};
        line.segment_origin = {"coded_placement_line"};
        out.push_back(std::move(line));
    }

    TradeoffCurve yu;
    yu.name = "yu";
    for (int t = 0; t <= k; ++t) {
        Rational m = rat(static_cast<long long>(n) * t, k);
        Rational r = Rational(binomial(k, t + 1) - binomial(k - n, t + 1)) /
                     Rational(binomial(k, t));
        yu.breakpoints.push_back({m, r});
        if (t)
            yu.segment_origin.push_back("yu(" + std::to_string(t - 1) + ".." +
                                        std::to_string(t) + ")");
    }
    out.push_back(std::move(yu));

    TradeoffCurve mn;
    mn.name = "maddah_ali_niesen";
    Rational m_mn = rat(static_cast<long long>(n) * (k - 1), k);
    mn.breakpoints = {{m_mn, rat(1) - m_mn / rat(n)}, {rat(n), rat(0)}};
    mn.segment_origin = {"maddah_ali_niesen"};
    out.push_back(std::move(mn));

    return out;
}

namespace {

using Point = std::pair<Rational, Rational>;

// Strictly-lower test for the turn p0 -> p1 -> p2 (cross product sign).
int orientation(const Point& p0, const Point& p1, const Point& p2)
{
    Rational cross = (p1.first - p0.first) * (p2.second - p0.second) -
                     (p2.first - p0.first) * (p1.second - p0.second);
    if (cross > 0)
        return 1;
    if (cross < 0)
        return -1;
    return 0;
}

std::vector<Point> lower_hull(std::vector<Point> points)
{
    std::sort(points.begin(), points.end());
    // Keep only the lowest R per distinct M.
    std::vector<Point> distinct;
    for (auto& p : points) {
        if (!distinct.empty() && distinct.back().first == p.first)
            continue;
        distinct.push_back(p);
    }
    std::vector<Point> hull;
    for (auto& p : distinct) {
        while (hull.size() >= 2 && orientation(hull[hull.size() - 2], hull.back(), p) <= 0)
            hull.pop_back();
        hull.push_back(p);
    }
    return hull;
}

} // namespace

Rational memory_share(const std::vector<Point>& points, const Rational& m)
{
    if (points.empty())
        throw DomainError("memory_share over empty point set");
    std::vector<Point> hull = lower_hull(points);
    if (m < hull.front().first || m > hull.back().first)
        throw DomainError("memory " + to_string(m) + " outside hull domain [" +
                          to_string(hull.front().first) + ", " +
                          to_string(hull.back().first) + "]");
    if (hull.size() == 1)
        return hull.front().second;
    for (std::size_t i = 0; i + 1 < hull.size(); ++i) {
        const auto& [m0, r0] = hull[i];
        const auto& [m1, r1] = hull[i + 1];
        if (m < m0 || m > m1)
            continue;
        return r0 + (r1 - r0) * (m - m0) / (m1 - m0);
    }
    return hull.back().second;
}

TradeoffCurve achievable_envelope(const NetworkConfig& cfg)
{
    std::vector<Point> points;
    for (auto& curve : achievable_curves(cfg))
        for (auto& p : curve.breakpoints)
            points.push_back(p);
    TradeoffCurve env;
    env.name = "achievable_envelope";
    env.breakpoints = lower_hull(std::move(points));
    for (std::size_t i = 0; i + 1 < env.breakpoints.size(); ++i)
        env.segment_origin.push_back("memory_sharing");
    return env;
}

std::string Segment::to_json() const
{
    json j;
    j["m_lo"] = to_string(m_lo);
    j["m_hi"] = to_string(m_hi);
    j["status"] = exact ? "exact" : "gap";
    j["lower"] = {{"slope", to_string(lower.slope)},
                  {"intercept", to_string(lower.intercept)},
                  {"origin", lower.origin}};
    j["upper"] = {{"slope", to_string(upper.slope)},
                  {"intercept", to_string(upper.intercept)},
                  {"origin", upper.origin}};
    return j.dump();
}

namespace {

// The piecewise structure of max over lines on [lo, hi].
std::vector<Segment> line_max_pieces(const std::vector<SegmentLine>& lines,
                                     const Rational& lo, const Rational& hi)
{
    std::set<Rational> cuts{lo, hi};
    for (std::size_t i = 0; i < lines.size(); ++i) {
        for (std::size_t j = i + 1; j < lines.size(); ++j) {
            if (lines[i].slope == lines[j].slope)
                continue;
            Rational x = (lines[j].intercept - lines[i].intercept) /
                         (lines[i].slope - lines[j].slope);
            if (x > lo && x < hi)
                cuts.insert(x);
        }
    }
    std::vector<Rational> xs(cuts.begin(), cuts.end());
    std::vector<Segment> pieces;
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
        Rational mid = (xs[i] + xs[i + 1]) / 2;
        const SegmentLine* best = &lines.front();
        for (auto& line : lines)
            if (line.value_at(mid) > best->value_at(mid))
                best = &line;
        if (!pieces.empty() && pieces.back().lower == *best) {
            pieces.back().m_hi = xs[i + 1];
        } else {
            Segment s;
            s.m_lo = xs[i];
            s.m_hi = xs[i + 1];
            s.lower = *best;
            pieces.push_back(std::move(s));
        }
    }
    return pieces;
}

SegmentLine line_through(const Point& p, const Point& q, const std::string& origin)
{
    Rational slope = (q.second - p.second) / (q.first - p.first);
    return SegmentLine{slope, p.second - slope * p.first, origin};
}

} // namespace

std::vector<Segment> exact_segments(const NetworkConfig& cfg)
{
    std::vector<SegmentLine> bound_lines;
    for (auto& b : all_bounds(cfg))
        bound_lines.push_back(
            SegmentLine{-b.m_coeff / b.r_coeff, b.rhs / b.r_coeff, b.origin});

    std::vector<Segment> lower_pieces =
        line_max_pieces(bound_lines, rat(0), rat(cfg.n_files));

    TradeoffCurve env = achievable_envelope(cfg);

    // Merge the two breakpoint structures.
    std::set<Rational> cuts;
    for (auto& piece : lower_pieces) {
        cuts.insert(piece.m_lo);
        cuts.insert(piece.m_hi);
    }
    for (auto& p : env.breakpoints)
        cuts.insert(p.first);
    std::vector<Rational> xs(cuts.begin(), cuts.end());

    auto lower_at = [&](const Rational& mid) {
        for (auto& piece : lower_pieces)
            if (mid >= piece.m_lo && mid <= piece.m_hi)
                return piece.lower;
        return lower_pieces.back().lower;
    };
    auto upper_at = [&](const Rational& mid) {
        for (std::size_t i = 0; i + 1 < env.breakpoints.size(); ++i)
            if (mid >= env.breakpoints[i].first && mid <= env.breakpoints[i + 1].first)
                return line_through(env.breakpoints[i], env.breakpoints[i + 1],
                                    "achievable");
        throw DomainError("memory outside achievable envelope");
    };

    std::vector<Segment> out;
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
        Rational mid = (xs[i] + xs[i + 1]) / 2;
        Segment s;
        s.m_lo = xs[i];
        s.m_hi = xs[i + 1];
        s.lower = lower_at(mid);
        s.upper = upper_at(mid);
        s.exact = s.lower.slope == s.upper.slope && s.lower.intercept == s.upper.intercept;
        if (s.exact) {
            s.upper.origin = s.lower.origin;
        }
        if (!out.empty() && out.back().exact == s.exact &&
            out.back().lower.slope == s.lower.slope &&
            out.back().lower.intercept == s.lower.intercept &&
            out.back().upper.slope == s.upper.slope &&
            out.back().upper.intercept == s.upper.intercept) {
            out.back().m_hi = s.m_hi;
        } else {
            out.push_back(std::move(s));
        }
    }
    return out;
}

Rational ComparisonRow::value(const std::string& name) const
{
    for (auto& [key, v] : values)
        if (key == name)
            return v;
    throw DomainError("no comparison row named '" + name + "'");
}

std::string ComparisonRow::to_json() const
{
    json j;
    j["m"] = to_string(m);
    j["case"] = to_string(applicable_case);
    json vals = json::object();
    for (auto& [key, v] : values)
        vals[key] = to_string(v);
    j["values"] = vals;
    return j.dump();
}

ComparisonRow comparison_table_row(const NetworkConfig& cfg)
{
    const long long n = cfg.n_files;
    const long long k = cfg.n_users;
    if (n < 2)
        throw DomainError("comparison table undefined for N=1 (M = N/(K(N-1)))");
    ComparisonRow row;
    row.applicable_case = cfg.regime();
    row.m = rat(n) / rat(k * (n - 1));

    Rational cutset = rat(n) - rat(n * n) / rat((n - 1) * k);
    Rational kn1 = rat(1) / rat(k * (n - 1));
    row.values.push_back({"cut_set", cutset});
    row.values.push_back({"ghasemi_ramamoorthy", cutset});
    row.values.push_back({"ajaykrishnan", cutset});
    row.values.push_back({"wang", cutset});
    if (row.applicable_case == CaseTag::one) {
        Rational extra = kn1 * (rat(n) - rat(k) + rat(k) / rat(n));
        row.values.push_back({"yu_converse", cutset + extra});
        row.values.push_back({"sengupta", cutset + extra});
        row.values.push_back({"new_lower_bound", cutset + kn1});
    } else {
        row.values.push_back({"yu_converse", cutset});
        row.values.push_back({"sengupta", cutset});
        row.values.push_back(
            {"new_lower_bound",
             cutset + rat(2) / rat(k * (n - 1) * (k + 3 - 2 * n))});
    }
    return row;
}

} // namespace cachekit
