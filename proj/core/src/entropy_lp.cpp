#include "cachekit/entropy_lp.hpp"

#include <algorithm>
#include <sstream>

#include <json.hpp>

#include "cachekit/simplex.hpp"

namespace cachekit {

using nlohmann::json;

namespace {

std::string fnv1a_hex(const std::string& data)
{
    std::uint64_t hash = 14695981039346656037ULL;
    for (unsigned char c : data) {
        hash ^= c;
        hash *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
    return buf;
}

std::string constraint_content(const Constraint& c)
{
    std::ostringstream out;
    out << (c.rel == Rel::eq ? "eq" : "ge");
    for (auto& term : c.terms)
        out << ';' << term.subset << ':' << to_string(term.coeff);
    out << ";m=" << to_string(c.m_coeff) << ";r=" << to_string(c.r_coeff)
        << ";rhs=" << to_string(c.rhs);
    return out.str();
}

void finalize(Constraint& c, const char* prefix)
{
    std::sort(c.terms.begin(), c.terms.end(),
              [](const LinTerm& a, const LinTerm& b) { return a.subset < b.subset; });
    c.id = std::string(prefix) + ":" + fnv1a_hex(constraint_content(c));
}

} // namespace

std::string GroundSet::var_name(int v) const
{
    if (v < cfg.n_files)
        return "W" + std::to_string(v + 1);
    if (v < cfg.n_files + cfg.n_users)
        return "Z" + std::to_string(v - cfg.n_files + 1);
    return "X" + std::to_string(v - cfg.n_files - cfg.n_users + 1);
}

std::string GroundSet::subset_name(std::uint32_t mask) const
{
    std::string out = "{";
    bool first = true;
    for (int v = 0; v < n_vars(); ++v) {
        if (!(mask >> v & 1u))
            continue;
        if (!first)
            out += ",";
        out += var_name(v);
        first = false;
    }
    return out + "}";
}

std::uint32_t GroundSet::subset_from_name(const std::string& text) const
{
    std::string inner = text;
    if (!inner.empty() && inner.front() == '{')
        inner = inner.substr(1, inner.size() - (inner.back() == '}' ? 2 : 1));
    std::uint32_t mask = 0;
    std::istringstream in(inner);
    std::string token;
    while (std::getline(in, token, ',')) {
        if (token.empty())
            continue;
        int idx = std::stoi(token.substr(1));
        switch (token[0]) {
        case 'W': mask |= 1u << file_var(idx); break;
        case 'Z': mask |= 1u << cache_var(idx); break;
        case 'X': mask |= 1u << demand_var(idx); break;
        default: throw DomainError("bad variable token '" + token + "'");
        }
    }
    return mask;
}

std::optional<int> GroundSet::demand_index(const Demand& d) const
{
    for (std::size_t j = 0; j < demands.size(); ++j)
        if (demands[j] == d)
            return static_cast<int>(j) + 1;
    return std::nullopt;
}

GroundSet build_ground_set(const NetworkConfig& cfg, std::vector<Demand> demands,
                           int cap)
{
    GroundSet gs;
    gs.cfg = cfg;
    for (auto& d : demands) {
        if (d.size() != cfg.n_users)
            throw DomainError("demand length mismatch in ground set");
        for (int r : d.requests)
            if (r < 1 || r > cfg.n_files)
                throw DomainError("demand entry outside 1..N in ground set");
        // Identical demands are the same random variable; keep one.
        if (!gs.demand_index(d))
            gs.demands.push_back(d);
    }
    int count = gs.n_vars();
    if (count > cap)
        throw DomainError("ground set needs " + std::to_string(count) +
                          " variables, above the cap of " + std::to_string(cap));
    return gs;
}

std::vector<Constraint> elemental_inequalities(const GroundSet& gs)
{
    const int n = gs.n_vars();
    const std::uint32_t full = gs.full_mask();
    std::vector<Constraint> out;
    for (int i = 0; i < n; ++i) {
        Constraint c;
        c.tag = "elemental";
        std::uint32_t rest = full & ~(1u << i);
        c.terms.push_back({full, rat(1)});
        if (rest)
            c.terms.push_back({rest, rat(-1)});
        finalize(c, "el");
        out.push_back(std::move(c));
    }
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            std::uint32_t rest = full & ~(1u << i) & ~(1u << j);
            // All subsets of rest, including the empty set.
            std::uint32_t s = 0;
            while (true) {
                Constraint c;
                c.tag = "elemental";
                c.terms.push_back({s | (1u << i), rat(1)});
                c.terms.push_back({s | (1u << j), rat(1)});
                c.terms.push_back({s | (1u << i) | (1u << j), rat(-1)});
                if (s)
                    c.terms.push_back({s, rat(-1)});
                finalize(c, "el");
                out.push_back(std::move(c));
                if (s == rest)
                    break;
                s = (s - rest) & rest; // next subset of rest
            }
        }
    return out;
}

std::vector<Constraint> problem_constraints(const GroundSet& gs)
{
    std::vector<Constraint> out;
    const int n = gs.cfg.n_files;
    const int k = gs.cfg.n_users;

    for (std::uint32_t a = 1; a <= gs.files_mask(); ++a) {
        Constraint c;
        c.tag = "file_independence";
        c.rel = Rel::eq;
        c.terms.push_back({a, rat(1)});
        c.rhs = rat(__builtin_popcount(a));
        finalize(c, "fi");
        out.push_back(std::move(c));
    }
    {
        Constraint c;
        c.tag = "function_closure";
        c.rel = Rel::eq;
        c.terms.push_back({gs.full_mask(), rat(1)});
        c.rhs = rat(n);
        finalize(c, "cl");
        out.push_back(std::move(c));
    }
    for (std::size_t j = 1; j <= gs.demands.size(); ++j)
        for (int l = 1; l <= k; ++l) {
            int f = gs.demands[j - 1].at(l);
            std::uint32_t small = (1u << gs.cache_var(l)) | (1u << gs.demand_var(j));
            std::uint32_t big = small | (1u << gs.file_var(f));
            Constraint c;
            c.tag = "decode";
            c.rel = Rel::eq;
            c.terms.push_back({big, rat(1)});
            c.terms.push_back({small, rat(-1)});
            finalize(c, "de");
            out.push_back(std::move(c));
        }
    for (int l = 1; l <= k; ++l) {
        Constraint c;
        c.tag = "cache_size";
        c.terms.push_back({1u << gs.cache_var(l), rat(-1)});
        c.m_coeff = rat(1);
        finalize(c, "ca");
        out.push_back(std::move(c));
    }
    for (std::size_t j = 1; j <= gs.demands.size(); ++j) {
        Constraint c;
        c.tag = "broadcast_size";
        c.terms.push_back({1u << gs.demand_var(j), rat(-1)});
        c.r_coeff = rat(1);
        finalize(c, "br");
        out.push_back(std::move(c));
    }
    return out;
}

std::uint32_t SymmetryElement::apply(std::uint32_t mask) const
{
    std::uint32_t out = 0;
    for (std::size_t v = 0; v < var_map.size(); ++v)
        if (mask >> v & 1u)
            out |= 1u << var_map[v];
    return out;
}

namespace {

std::optional<SymmetryElement> make_element(const GroundSet& gs,
                                            const std::vector<int>& user_perm,
                                            const std::vector<int>& file_perm)
{
    SymmetryElement el;
    el.user_perm = user_perm;
    el.file_perm = file_perm;
    el.var_map.resize(gs.n_vars());
    for (int f = 1; f <= gs.cfg.n_files; ++f)
        el.var_map[gs.file_var(f)] = gs.file_var(file_perm[f - 1]);
    for (int l = 1; l <= gs.cfg.n_users; ++l)
        el.var_map[gs.cache_var(l)] = gs.cache_var(user_perm[l - 1]);
    for (std::size_t j = 1; j <= gs.demands.size(); ++j) {
        Demand mapped = apply_user_permutation(gs.demands[j - 1], user_perm);
        for (auto& r : mapped.requests)
            r = file_perm[r - 1];
        auto idx = gs.demand_index(mapped);
        if (!idx)
            return std::nullopt; // leaves the listed multiset
        el.var_map[gs.demand_var(static_cast<int>(j))] = gs.demand_var(*idx);
    }
    return el;
}

} // namespace

std::vector<SymmetryElement> symmetry_group(const GroundSet& gs, bool with_file_perms)
{
    const int k = gs.cfg.n_users;
    const int n = gs.cfg.n_files;
    if (k > 8)
        throw DomainError("symmetry enumeration supported for K <= 8, got K=" +
                          std::to_string(k));
    std::vector<int> identity_files(n);
    for (int f = 0; f < n; ++f)
        identity_files[f] = f + 1;

    std::vector<std::vector<int>> file_perms;
    if (with_file_perms) {
        std::vector<int> sigma = identity_files;
        do {
            file_perms.push_back(sigma);
        } while (std::next_permutation(sigma.begin(), sigma.end()));
    } else {
        file_perms.push_back(identity_files);
    }

    std::vector<SymmetryElement> group;
    std::vector<int> pi(k);
    for (int l = 0; l < k; ++l)
        pi[l] = l + 1;
    do {
        for (auto& sigma : file_perms)
            if (auto el = make_element(gs, pi, sigma))
                group.push_back(std::move(*el));
    } while (std::next_permutation(pi.begin(), pi.end()));
    return group;
}

namespace {

std::vector<std::uint32_t> orbit_representatives(const GroundSet& gs,
                                                 const std::vector<SymmetryElement>& group)
{
    std::vector<std::uint32_t> rep(1u << gs.n_vars());
    for (std::uint32_t mask = 0; mask < rep.size(); ++mask) {
        std::uint32_t best = mask;
        for (auto& el : group)
            best = std::min(best, el.apply(mask));
        rep[mask] = best;
    }
    return rep;
}

} // namespace

std::vector<Constraint> symmetry_constraints(const GroundSet& gs, bool with_file_perms)
{
    auto group = symmetry_group(gs, with_file_perms);
    auto rep = orbit_representatives(gs, group);
    std::vector<Constraint> out;
    for (std::uint32_t mask = 1; mask < rep.size(); ++mask) {
        if (rep[mask] == mask)
            continue;
        Constraint c;
        c.tag = "symmetry";
        c.rel = Rel::eq;
        c.terms.push_back({mask, rat(1)});
        c.terms.push_back({rep[mask], rat(-1)});
        finalize(c, "sy");
        out.push_back(std::move(c));
    }
    return out;
}

const Constraint& LpProblem::by_id(const std::string& id) const
{
    int idx = index_of_id(id);
    if (idx < 0)
        throw CertificateError("no constraint with id '" + id + "'");
    return constraints[idx];
}

int LpProblem::index_of_id(const std::string& id) const
{
    auto it = id_index_.find(id);
    return it == id_index_.end() ? -1 : it->second;
}

int LpProblem::mono_row(int var) const
{
    auto it = mono_index_.find(var);
    return it == mono_index_.end() ? -1 : it->second;
}

int LpProblem::submod_row(int i, int j, std::uint32_t context) const
{
    auto it = submod_index_.find({std::min(i, j), std::max(i, j), context});
    return it == submod_index_.end() ? -1 : it->second;
}

int LpProblem::decode_row(int user, int demand_idx) const
{
    auto it = decode_index_.find({user, demand_idx});
    return it == decode_index_.end() ? -1 : it->second;
}

int LpProblem::file_row(std::uint32_t file_subset) const
{
    auto it = file_index_.find(file_subset);
    return it == file_index_.end() ? -1 : it->second;
}

int LpProblem::symmetry_row(std::uint32_t subset) const
{
    auto it = symmetry_index_.find(subset);
    return it == symmetry_index_.end() ? -1 : it->second;
}

int LpProblem::cache_row(int user) const
{
    return cache_index_.at(user - 1);
}

int LpProblem::broadcast_row(int demand_idx) const
{
    return broadcast_index_.at(demand_idx - 1);
}

int LpProblem::closure_row() const
{
    return closure_index_;
}

LpProblem build_lp(const GroundSet& gs, const LpOptions& options)
{
    LpProblem lp;
    lp.gs = gs;
    lp.options = options;
    for (auto& c : elemental_inequalities(gs))
        lp.constraints.push_back(std::move(c));
    for (auto& c : problem_constraints(gs))
        lp.constraints.push_back(std::move(c));
    if (options.symmetry) {
        auto group = symmetry_group(gs, options.file_symmetry);
        lp.orbit_rep = orbit_representatives(gs, group);
        for (auto& c : symmetry_constraints(gs, options.file_symmetry))
            lp.constraints.push_back(std::move(c));
    } else {
        lp.orbit_rep.resize(1u << gs.n_vars());
        for (std::uint32_t mask = 0; mask < lp.orbit_rep.size(); ++mask)
            lp.orbit_rep[mask] = mask;
    }

    lp.cache_index_.assign(gs.cfg.n_users, -1);
    lp.broadcast_index_.assign(gs.demands.size(), -1);
    for (std::size_t idx = 0; idx < lp.constraints.size(); ++idx) {
        const Constraint& c = lp.constraints[idx];
        if (!lp.id_index_.emplace(c.id, static_cast<int>(idx)).second)
            throw LpError("duplicate constraint id " + c.id);
        int i = static_cast<int>(idx);
        if (c.tag == "elemental") {
            std::vector<std::uint32_t> plus;
            for (auto& term : c.terms)
                if (term.coeff > 0)
                    plus.push_back(term.subset);
            if (plus.size() == 1) {
                // Monotonicity H(V) - H(V\v).
                std::uint32_t dropped = gs.full_mask();
                for (auto& term : c.terms)
                    if (term.coeff < 0)
                        dropped = gs.full_mask() & ~term.subset;
                int var = __builtin_ctz(dropped);
                lp.mono_index_[var] = i;
            } else {
                std::uint32_t context = plus[0] & plus[1];
                std::uint32_t pair = (plus[0] | plus[1]) & ~context;
                int a = __builtin_ctz(pair);
                int b = __builtin_ctz(pair & ~(1u << a));
                lp.submod_index_[{a, b, context}] = i;
            }
        } else if (c.tag == "file_independence") {
            lp.file_index_[c.terms[0].subset] = i;
        } else if (c.tag == "function_closure") {
            lp.closure_index_ = i;
        } else if (c.tag == "decode") {
            std::uint32_t small =
                c.terms[0].coeff < 0 ? c.terms[0].subset : c.terms[1].subset;
            int zvar = -1, xvar = -1;
            for (int v = gs.cfg.n_files; v < gs.cfg.n_files + gs.cfg.n_users; ++v)
                if (small >> v & 1u)
                    zvar = v;
            for (int v = gs.cfg.n_files + gs.cfg.n_users; v < gs.n_vars(); ++v)
                if (small >> v & 1u)
                    xvar = v;
            int user = zvar - gs.cfg.n_files + 1;
            int demand = xvar - gs.cfg.n_files - gs.cfg.n_users + 1;
            lp.decode_index_[{user, demand}] = i;
        } else if (c.tag == "cache_size") {
            int var = __builtin_ctz(c.terms[0].subset);
            lp.cache_index_[var - gs.cfg.n_files] = i;
        } else if (c.tag == "broadcast_size") {
            int var = __builtin_ctz(c.terms[0].subset);
            lp.broadcast_index_[var - gs.cfg.n_files - gs.cfg.n_users] = i;
        } else if (c.tag == "symmetry") {
            lp.symmetry_index_[c.terms[1].subset] = i; // the non-representative
        }
    }
    return lp;
}

namespace {

struct ResolvedRow {
    const Constraint* constraint;
    bool reversed;
};

ResolvedRow resolve_id(const LpProblem& problem, const std::string& raw)
{
    bool reversed = !raw.empty() && raw.back() == '~';
    std::string id = reversed ? raw.substr(0, raw.size() - 1) : raw;
    const Constraint& c = problem.by_id(id);
    if (reversed && c.rel != Rel::eq)
        throw CertificateError("reversed orientation '" + raw +
                               "' only applies to equality constraints");
    return {&c, reversed};
}

} // namespace

LinearBound verify_certificate(const LpProblem& problem, const DualCertificate& cert)
{
    std::map<std::uint32_t, Rational> residual;
    Rational a = 0, b = 0, c_sum = 0;
    for (auto& [raw_id, mult] : cert.multipliers) {
        if (mult < 0)
            throw CertificateError("negative multiplier on " + raw_id);
        if (mult == 0)
            continue;
        ResolvedRow row = resolve_id(problem, raw_id);
        Rational sign = row.reversed ? rat(-1) : rat(1);
        for (auto& term : row.constraint->terms)
            residual[term.subset] += sign * mult * term.coeff;
        a += sign * mult * row.constraint->m_coeff;
        b += sign * mult * row.constraint->r_coeff;
        c_sum += sign * mult * row.constraint->rhs;
    }
    for (auto& [subset, coeff] : residual)
        if (coeff != 0)
            throw CertificateError("residual entropy coefficient " + to_string(coeff) +
                                   " on " + problem.gs.subset_name(subset));
    if (b <= 0)
        throw CertificateError("certificate has nonpositive R coefficient " +
                               to_string(b));
    return LinearBound{a, b, c_sum, "lp_certificate"};
}

namespace {

struct ReducedRow {
    std::map<std::uint32_t, Rational> terms;
    Rational r_coeff;
    Rational rhs;
    int orig;
    bool reversed;
};

std::string reduced_key(const ReducedRow& row)
{
    std::ostringstream out;
    for (auto& [mask, coeff] : row.terms)
        out << mask << ':' << to_string(coeff) << ';';
    out << "r=" << to_string(row.r_coeff) << ";rhs=" << to_string(row.rhs);
    return out.str();
}

} // namespace

SolveResult solve_min_rate(const LpProblem& problem, const Rational& m)
{
    const auto& rep = problem.orbit_rep;

    // Project constraints onto orbit representatives, fold M = m into the
    // right-hand side, split equalities, and drop duplicates.
    std::vector<ReducedRow> rows;
    std::map<std::string, int> seen;
    for (std::size_t idx = 0; idx < problem.constraints.size(); ++idx) {
        const Constraint& c = problem.constraints[idx];
        if (c.tag == "symmetry")
            continue;
        ReducedRow base;
        base.orig = static_cast<int>(idx);
        base.reversed = false;
        for (auto& term : c.terms) {
            Rational& slot = base.terms[rep[term.subset]];
            slot += term.coeff;
        }
        std::erase_if(base.terms, [](const auto& kv) { return kv.second == 0; });
        base.r_coeff = c.r_coeff;
        base.rhs = c.rhs - c.m_coeff * m;
        auto push = [&](ReducedRow row) {
            std::string key = reduced_key(row);
            if (seen.emplace(key, 1).second)
                rows.push_back(std::move(row));
        };
        if (c.rel == Rel::ge) {
            push(std::move(base));
        } else {
            ReducedRow rev;
            rev.orig = base.orig;
            rev.reversed = true;
            for (auto& [mask, coeff] : base.terms)
                rev.terms[mask] = -coeff;
            rev.r_coeff = -base.r_coeff;
            rev.rhs = -base.rhs;
            push(std::move(base));
            push(std::move(rev));
        }
    }

    // Variable numbering over the representative subsets that occur.
    std::map<std::uint32_t, int> var_of;
    for (auto& row : rows)
        for (auto& [mask, coeff] : row.terms)
            var_of.emplace(mask, 0);
    int next = 0;
    for (auto& [mask, id] : var_of)
        id = next++;
    const int n_vars = next;      // entropy variables
    const int r_var = n_vars;     // R
    const int n_rows = static_cast<int>(rows.size());

    // Dual of:  min R  s.t.  sum_v a[i][v] h_v + r_i R >= b_i  (h, R free)
    //   max b.y  s.t.  A^T y = c, y >= 0   with c = e_R.
    StandardLp dual;
    dual.a.assign(n_vars + 1, std::vector<Rational>(n_rows, Rational(0)));
    dual.b.assign(n_vars + 1, Rational(0));
    dual.b[r_var] = 1;
    dual.c.assign(n_rows, Rational(0));
    for (int i = 0; i < n_rows; ++i) {
        for (auto& [mask, coeff] : rows[i].terms)
            dual.a[var_of[mask]][i] = coeff;
        if (rows[i].r_coeff != 0)
            dual.a[r_var][i] = rows[i].r_coeff;
        dual.c[i] = -rows[i].rhs; // max b.y as min (-b).y
    }

    SimplexSolution sol = solve_standard_lp(dual);
    if (sol.status == LpStatus::infeasible)
        throw LpError("entropy LP is unbounded below (modeling bug): "
                      "the dual has no feasible multipliers");
    if (sol.status == LpStatus::unbounded)
        throw LpError("entropy LP is infeasible (modeling bug): "
                      "the dual is unbounded");

    SolveResult result;
    result.pivots = sol.pivots;
    result.value = -sol.objective;

    // Lift the dual solution to a certificate over the original constraints;
    // coefficients moved between orbit members are patched through the
    // symmetry equalities.
    std::map<std::string, Rational> mult;
    for (int i = 0; i < n_rows; ++i) {
        const Rational& y = sol.x[i];
        if (y == 0)
            continue;
        const Constraint& orig = problem.constraints[rows[i].orig];
        std::string id = orig.id + (rows[i].reversed ? "~" : "");
        mult[id] += y;
        Rational dir = rows[i].reversed ? rat(-1) : rat(1);
        for (auto& term : orig.terms) {
            if (rep[term.subset] == term.subset)
                continue;
            int sym = problem.symmetry_row(term.subset);
            if (sym < 0)
                throw LpError("missing symmetry row for " +
                              problem.gs.subset_name(term.subset));
            Rational signed_coeff = dir * term.coeff * y;
            // Replace signed_coeff*H(S) by signed_coeff*H(rep) using
            // H(S) - H(rep) = 0.
            const std::string& sym_id = problem.constraints[sym].id;
            if (signed_coeff > 0)
                mult[sym_id + "~"] += signed_coeff;
            else
                mult[sym_id] += -signed_coeff;
        }
    }
    // Net opposite orientations of the same equality.
    for (auto it = mult.begin(); it != mult.end(); ++it) {
        if (it->first.empty() || it->first.back() == '~')
            continue;
        auto rev = mult.find(it->first + "~");
        if (rev == mult.end())
            continue;
        Rational cancel = std::min(it->second, rev->second);
        it->second -= cancel;
        rev->second -= cancel;
    }

    DualCertificate cert;
    for (auto& [id, value] : mult)
        if (value != 0)
            cert.multipliers.push_back({id, value});
    cert.implied = verify_certificate(problem, cert);
    if (cert.implied.value_at(m) != result.value)
        throw LpError("certificate value " + to_string(cert.implied.value_at(m)) +
                      " disagrees with LP optimum " + to_string(result.value));
    result.certificate = std::move(cert);

    // Primal solution: the simplex multipliers of the dual problem.
    // The standard-form problem is the dual; its simplex multipliers are the
    // negated primal values.
    result.entropy.assign(1u << problem.gs.n_vars(), Rational(0));
    std::vector<Rational> reduced_h(n_vars + 1, Rational(0));
    for (int v = 0; v <= n_vars; ++v)
        reduced_h[v] = Rational(-sol.row_multipliers[v]);
    if (reduced_h[r_var] != result.value)
        throw LpError("primal extraction mismatch: R " + to_string(reduced_h[r_var]) +
                      " vs optimum " + to_string(result.value));
    for (std::uint32_t mask = 1; mask < result.entropy.size(); ++mask) {
        auto it = var_of.find(rep[mask]);
        if (it != var_of.end())
            result.entropy[mask] = reduced_h[it->second];
    }
    return result;
}

std::string LpProblem::to_json() const
{
    json j;
    j["format_version"] = 1;
    j["n"] = gs.cfg.n_files;
    j["k"] = gs.cfg.n_users;
    json demands = json::array();
    for (auto& d : gs.demands)
        demands.push_back(to_string(d));
    j["demands"] = demands;
    j["symmetry"] = options.symmetry;
    j["file_symmetry"] = options.file_symmetry;
    json rows = json::array();
    for (auto& c : constraints) {
        json row;
        row["id"] = c.id;
        row["tag"] = c.tag;
        row["rel"] = c.rel == Rel::eq ? "eq" : "ge";
        json terms = json::array();
        for (auto& t : c.terms)
            terms.push_back({gs.subset_name(t.subset), to_string(t.coeff)});
        row["terms"] = terms;
        row["m"] = to_string(c.m_coeff);
        row["r"] = to_string(c.r_coeff);
        row["rhs"] = to_string(c.rhs);
        rows.push_back(std::move(row));
    }
    j["constraints"] = rows;
    return j.dump();
}

std::string DualCertificate::to_json(const LpProblem& problem, const Rational& m,
                                     const Rational& value) const
{
    return certificate_file_json(problem, *this, m, value);
}

std::string certificate_file_json(const LpProblem& problem, const DualCertificate& cert,
                                  const Rational& m, const Rational& value)
{
    json j;
    j["format_version"] = 1;
    j["n"] = problem.gs.cfg.n_files;
    j["k"] = problem.gs.cfg.n_users;
    json demands = json::array();
    for (auto& d : problem.gs.demands)
        demands.push_back(to_string(d));
    j["demands"] = demands;
    j["file_symmetry"] = problem.options.file_symmetry;
    j["m"] = to_string(m);
    j["value"] = to_string(value);
    j["implied"] = {{"a", to_string(cert.implied.m_coeff)},
                    {"b", to_string(cert.implied.r_coeff)},
                    {"c", to_string(cert.implied.rhs)}};
    json mults = json::array();
    for (auto& [id, coeff] : cert.multipliers)
        mults.push_back({id, to_string(coeff)});
    j["multipliers"] = mults;
    return j.dump(2);
}

CertificateFile certificate_from_json(const std::string& text)
{
    json j = json::parse(text);
    CertificateFile file;
    file.cfg = make_config(j.at("n").get<int>(), j.at("k").get<int>());
    for (auto& d : j.at("demands"))
        file.demands.push_back(demand_from_string(d.get<std::string>(), file.cfg));
    file.file_symmetry = j.value("file_symmetry", false);
    file.m = parse_rational(j.at("m").get<std::string>());
    file.value = parse_rational(j.at("value").get<std::string>());
    file.certificate.implied =
        LinearBound{parse_rational(j.at("implied").at("a").get<std::string>()),
                    parse_rational(j.at("implied").at("b").get<std::string>()),
                    parse_rational(j.at("implied").at("c").get<std::string>()),
                    "lp_certificate"};
    for (auto& entry : j.at("multipliers"))
        file.certificate.multipliers.push_back(
            {entry.at(0).get<std::string>(),
             parse_rational(entry.at(1).get<std::string>())});
    return file;
}

} // namespace cachekit
