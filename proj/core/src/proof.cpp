#include "cachekit/proof.hpp"

#include <algorithm>
#include <sstream>

#include <json.hpp>

namespace cachekit {

using nlohmann::json;

namespace {

std::uint32_t zmask(const GroundSet& gs, const UserSet& users)
{
    std::uint32_t mask = 0;
    for (int u : users)
        mask |= 1u << gs.cache_var(u);
    return mask;
}

std::uint32_t zbit(const GroundSet& gs, int user)
{
    return 1u << gs.cache_var(user);
}

std::uint32_t xbit(const GroundSet& gs, int demand)
{
    return 1u << gs.demand_var(demand);
}

std::uint32_t wbit(const GroundSet& gs, int file)
{
    return 1u << gs.file_var(file);
}

// W_1..W_count
std::uint32_t wprefix(const GroundSet& gs, int count)
{
    std::uint32_t mask = 0;
    for (int f = 1; f <= count; ++f)
        mask |= wbit(gs, f);
    return mask;
}

bool subset_of(std::uint32_t a, std::uint32_t b)
{
    return (a & ~b) == 0;
}

} // namespace

Rational EntropyExpression::coeff(std::uint32_t subset) const
{
    auto it = terms.find(subset);
    return it == terms.end() ? Rational(0) : it->second;
}

void EntropyExpression::add(std::uint32_t subset, const Rational& delta)
{
    if (subset == 0 || delta == 0)
        return;
    Rational& slot = terms[subset];
    slot += delta;
    if (slot == 0)
        terms.erase(subset);
}

Rational EntropyExpression::eval(const std::vector<Rational>& h) const
{
    Rational total = constant;
    for (auto& [subset, c] : terms)
        total += c * h.at(subset);
    return total;
}

std::string to_string(Rule rule)
{
    switch (rule) {
    case Rule::submod: return "SUBMOD";
    case Rule::decode: return "DECODE";
    case Rule::fileclose: return "FILECLOSE";
    case Rule::symm: return "SYMM";
    case Rule::mono: return "MONO";
    case Rule::const_floor: return "CONST";
    }
    return "?";
}

namespace {

void require_coeff(const GroundSet& gs, const EntropyExpression& expr,
                   std::uint32_t subset, const Rational& w, const char* rule)
{
    if (expr.coeff(subset) < w)
        throw StepError(std::string(rule) + ": coefficient of " +
                        gs.subset_name(subset) + " is " +
                        to_string(expr.coeff(subset)) + ", needs " + to_string(w));
}

} // namespace

EntropyExpression apply_step(const GroundSet& gs, EntropyExpression expr,
                             const ProofStep& step)
{
    const Rational& w = step.weight;
    if (w <= 0)
        throw StepError("step weight must be positive");
    switch (step.rule) {
    case Rule::submod: {
        std::uint32_t s = step.subset, t = step.other;
        if (s == t)
            throw StepError("SUBMOD: identical subsets " + gs.subset_name(s));
        if (subset_of(s, t) || subset_of(t, s))
            throw StepError("SUBMOD: nested subsets " + gs.subset_name(s) + ", " +
                            gs.subset_name(t));
        require_coeff(gs, expr, s, w, "SUBMOD");
        require_coeff(gs, expr, t, w, "SUBMOD");
        expr.add(s, -w);
        expr.add(t, -w);
        expr.add(s | t, w);
        expr.add(s & t, w); // empty intersection contributes nothing
        return expr;
    }
    case Rule::decode: {
        std::uint32_t s = step.subset;
        if (step.demand < 1 || step.demand > static_cast<int>(gs.demands.size()))
            throw StepError("DECODE: demand index " + std::to_string(step.demand) +
                            " not in the ground set");
        if (step.user < 1 || step.user > gs.cfg.n_users)
            throw StepError("DECODE: user index outside 1..K");
        if (!(s & zbit(gs, step.user)))
            throw StepError("DECODE: Z" + std::to_string(step.user) + " not in " +
                            gs.subset_name(s));
        if (!(s & xbit(gs, step.demand)))
            throw StepError("DECODE: X" + std::to_string(step.demand) + " not in " +
                            gs.subset_name(s));
        int f = gs.demands[step.demand - 1].at(step.user);
        if (s & wbit(gs, f))
            throw StepError("DECODE: W" + std::to_string(f) + " already in " +
                            gs.subset_name(s));
        require_coeff(gs, expr, s, w, "DECODE");
        expr.add(s, -w);
        expr.add(s | wbit(gs, f), w);
        return expr;
    }
    case Rule::fileclose: {
        std::uint32_t s = step.subset;
        std::uint32_t files = gs.files_mask();
        if (!subset_of(files, s))
            throw StepError("FILECLOSE: " + gs.subset_name(s) +
                            " does not contain every file");
        if (s == files)
            throw StepError("FILECLOSE: " + gs.subset_name(s) +
                            " is a pure file subset; use CONST");
        require_coeff(gs, expr, s, w, "FILECLOSE");
        expr.add(s, -w);
        expr.constant += w * rat(gs.cfg.n_files);
        return expr;
    }
    case Rule::symm: {
        std::uint32_t s = step.subset;
        if (!is_permutation_of_users(step.perm, gs.cfg.n_users))
            throw StepError("SYMM: not a permutation of 1..K");
        require_coeff(gs, expr, s, w, "SYMM");
        std::uint32_t out = s & gs.files_mask();
        for (int l = 1; l <= gs.cfg.n_users; ++l)
            if (s & zbit(gs, l))
                out |= zbit(gs, step.perm[l - 1]);
        for (std::size_t j = 1; j <= gs.demands.size(); ++j) {
            if (!(s & xbit(gs, static_cast<int>(j))))
                continue;
            Demand mapped = apply_user_permutation(gs.demands[j - 1], step.perm);
            auto idx = gs.demand_index(mapped);
            if (!idx)
                throw StepError("SYMM: permuted demand (" + to_string(mapped) +
                                ") is not listed in the ground set");
            out |= xbit(gs, *idx);
        }
        expr.add(s, -w);
        expr.add(out, w);
        return expr;
    }
    case Rule::mono: {
        std::uint32_t s = step.subset, keep = step.other;
        if (!subset_of(keep, s) || keep == s)
            throw StepError("MONO: " + gs.subset_name(keep) +
                            " is not a proper subset of " + gs.subset_name(s));
        require_coeff(gs, expr, s, w, "MONO");
        expr.add(s, -w);
        expr.add(keep, w);
        return expr;
    }
    case Rule::const_floor: {
        std::uint32_t s = step.subset;
        if (s == 0 || !subset_of(s, gs.files_mask()))
            throw StepError("CONST: " + gs.subset_name(s) +
                            " is not a nonempty pure file subset");
        require_coeff(gs, expr, s, w, "CONST");
        expr.add(s, -w);
        expr.constant += w * rat(__builtin_popcount(s));
        return expr;
    }
    }
    throw StepError("unknown rule");
}

EntropyExpression chain_start(const ProofChain& chain)
{
    EntropyExpression expr;
    const GroundSet& gs = chain.gs;
    for (int l = 1; l <= gs.cfg.n_users; ++l)
        expr.add(zbit(gs, l), chain.cache_weights.at(l - 1));
    for (std::size_t j = 1; j <= gs.demands.size(); ++j)
        expr.add(xbit(gs, static_cast<int>(j)),
                 chain.demand_weights.at(j - 1));
    return expr;
}

LinearBound verify_chain(const ProofChain& chain)
{
    const GroundSet& gs = chain.gs;
    if (static_cast<int>(chain.cache_weights.size()) != gs.cfg.n_users)
        throw ChainError("cache weight count != K");
    if (chain.demand_weights.size() != gs.demands.size())
        throw ChainError("demand weight count != number of listed demands");
    Rational a = 0, b = 0;
    for (auto& w : chain.cache_weights) {
        if (w < 0)
            throw ChainError("negative cache weight");
        a += w;
    }
    for (auto& v : chain.demand_weights) {
        if (v < 0)
            throw ChainError("negative demand weight");
        b += v;
    }
    if (a != chain.claimed.m_coeff || b != chain.claimed.r_coeff)
        throw ChainError("opening weights give " + to_string(a) + "M + " +
                         to_string(b) + "R, claim says " +
                         to_string(chain.claimed.m_coeff) + "M + " +
                         to_string(chain.claimed.r_coeff) + "R");

    EntropyExpression expr = chain_start(chain);
    for (std::size_t i = 0; i < chain.steps.size(); ++i) {
        try {
            expr = apply_step(gs, std::move(expr), chain.steps[i]);
        } catch (const StepError& e) {
            throw ChainError("step " + std::to_string(i + 1) + " (" +
                             to_string(chain.steps[i].rule) + "): " + e.what());
        }
    }
    if (!expr.terms.empty()) {
        std::string leftovers;
        int shown = 0;
        for (auto& [subset, coeff] : expr.terms) {
            if (shown++ == 4) {
                leftovers += ", ...";
                break;
            }
            leftovers += (shown > 1 ? ", " : "") + to_string(coeff) + "*H" +
                         gs.subset_name(subset);
        }
        throw ChainError("final expression is not a constant; leftover terms: " +
                         leftovers);
    }
    if (expr.constant != chain.claimed.rhs)
        throw ChainError("chain floors at " + to_string(expr.constant) +
                         ", claim says " + to_string(chain.claimed.rhs));
    return chain.claimed;
}

std::vector<ProofStep> macro_lemma_repeated(const GroundSet& gs, const UserSet& s,
                                            const UserSet& t, int l)
{
    if (l < 1 || l > static_cast<int>(gs.demands.size()))
        throw StepError("lemma-repeated: demand index " + std::to_string(l) +
                        " not in the ground set");
    int bar = target_user_index(gs.cfg, l);
    if (set_contains(s, bar) || set_contains(t, bar))
        throw StepError("lemma-repeated: sets must avoid the W_N requester U" +
                        std::to_string(bar));
    if (gs.demands[l - 1].at(bar) != gs.cfg.n_files)
        throw StepError("lemma-repeated: user U" + std::to_string(bar) +
                        " does not request W_N in demand " + std::to_string(l));
    std::uint32_t w = wprefix(gs, gs.cfg.n_files - 1);
    std::uint32_t t1 = w | zmask(gs, s) | zbit(gs, bar);
    std::uint32_t t2 = w | zmask(gs, t) | xbit(gs, l);
    std::vector<ProofStep> steps;
    steps.push_back({Rule::submod, rat(1), t1, t2, 0, 0, {}});
    std::uint32_t u = t1 | t2;
    steps.push_back({Rule::decode, rat(1), u, 0, bar, l, {}});
    steps.push_back({Rule::fileclose, rat(1), u | wbit(gs, gs.cfg.n_files), 0, 0, 0, {}});
    return steps;
}

std::vector<ProofStep> macro_sum_increment(const GroundSet& gs,
                                           const std::vector<UserSet>& anchors,
                                           const std::vector<UserSet>& term_sets,
                                           int l, int j)
{
    if (j < l)
        throw StepError("sum increment: j < l");
    if (static_cast<int>(anchors.size()) != j - l + 1 ||
        static_cast<int>(term_sets.size()) != j - l)
        throw StepError("sum increment: set sequence sizes do not match [l, j]");
    std::vector<ProofStep> steps;
    for (int i = l + 1; i <= j; ++i) {
        const UserSet& prev = anchors[i - l - 1];
        const UserSet& cur = anchors[i - l];
        const UserSet& term = term_sets[i - l - 1];
        int bar = target_user_index(gs.cfg, i);
        if (set_contains(cur, bar) || set_union(cur, UserSet{bar}) != prev)
            throw StepError("sum increment premise S_{i-1} = S_i + {bar(i)} fails at i=" +
                            std::to_string(i));
        if (set_intersection(cur, term) != cur)
            throw StepError("sum increment: S_i not contained in the term set at i=" +
                            std::to_string(i));
        for (auto& step : macro_lemma_repeated(gs, cur, term, i))
            steps.push_back(std::move(step));
    }
    return steps;
}

std::vector<ProofStep> macro_sum_increment(const GroundSet& gs,
                                           const std::vector<UserSet>& sets, int l,
                                           int j)
{
    std::vector<UserSet> terms(sets.begin() + 1, sets.end());
    return macro_sum_increment(gs, sets, terms, l, j);
}

std::vector<ProofStep> macro_sum_decrement(const GroundSet& gs,
                                           const std::vector<UserSet>& tsets,
                                           const std::vector<int>& demand_indices)
{
    if (tsets.size() != demand_indices.size())
        throw StepError("sum decrement: set and demand counts differ");
    for (std::size_t idx = 1; idx < tsets.size(); ++idx) {
        int bar = target_user_index(gs.cfg, demand_indices[idx - 1]);
        if (set_contains(tsets[idx - 1], bar) ||
            set_union(tsets[idx - 1], UserSet{bar}) != tsets[idx])
            throw StepError("sum decrement premise T_{i+1} = T_i + {bar(i)} fails at i=" +
                            std::to_string(demand_indices[idx - 1]));
    }
    std::vector<ProofStep> steps;
    for (std::size_t idx = tsets.size(); idx-- > 0;)
        for (auto& step :
             macro_lemma_repeated(gs, tsets[idx], tsets[idx], demand_indices[idx]))
            steps.push_back(std::move(step));
    return steps;
}

std::vector<ProofStep> macro_case2_reduction(const GroundSet& gs, const UserSet& a,
                                             const UserSet& b, const UserSet& c,
                                             int l)
{
    const int n = gs.cfg.n_files;
    if (l < 1 || l > static_cast<int>(gs.demands.size()))
        throw StepError("case-2 reduction: demand index not in the ground set");
    const Demand& d = gs.demands[l - 1];
    if (b.empty())
        return {};
    for (int u : b)
        if (d.at(u) != 1)
            throw StepError("case-2 reduction: user U" + std::to_string(u) +
                            " requests W" + std::to_string(d.at(u)) +
                            ", not W1, in demand " + std::to_string(l));
    for (int f = 2; f <= n; ++f) {
        bool covered = std::any_of(c.begin(), c.end(),
                                   [&](int u) { return d.at(u) == f; });
        if (!covered)
            throw StepError("case-2 reduction: no user in C requests W" +
                            std::to_string(f) + " in demand " + std::to_string(l));
    }
    if (n == 1)
        throw StepError("case-2 reduction: with B nonempty the W1 context term "
                        "cannot be closed when N=1");

    std::uint32_t w = wprefix(gs, n - 1);
    std::uint32_t x = xbit(gs, l);
    std::vector<ProofStep> steps;
    for (int u : b)
        steps.push_back({Rule::submod, rat(1), zbit(gs, u), x, 0, 0, {}});
    for (int u : b)
        steps.push_back({Rule::decode, rat(1), zbit(gs, u) | x, 0, u, l, {}});
    std::uint32_t cur = wbit(gs, 1) | zbit(gs, b.front()) | x;
    for (std::size_t i = 1; i < b.size(); ++i) {
        std::uint32_t nextt = wbit(gs, 1) | zbit(gs, b[i]) | x;
        steps.push_back({Rule::submod, rat(1), cur, nextt, 0, 0, {}});
        cur |= nextt;
    }
    std::uint32_t t1 = w | zmask(gs, a) | x;
    std::uint32_t t2 = cur; // {W1} | Z_B | X
    std::uint32_t inter;
    if (subset_of(t1, t2)) {
        inter = t1;
    } else if (subset_of(t2, t1)) {
        inter = t2;
    } else {
        steps.push_back({Rule::submod, rat(1), t1, t2, 0, 0, {}});
        inter = t1 & t2;
    }
    std::uint32_t spare = wbit(gs, 1) | x;
    if (inter != spare)
        steps.push_back({Rule::mono, rat(1), inter, spare, 0, 0, {}});
    for (std::size_t copy = 0; copy < b.size(); ++copy) {
        std::uint32_t cur2 = spare;
        if (!c.empty()) {
            steps.push_back({Rule::submod, rat(1), cur2, zmask(gs, c), 0, 0, {}});
            cur2 |= zmask(gs, c);
        }
        for (int f = 2; f <= n; ++f) {
            if (cur2 & wbit(gs, f))
                continue;
            auto it = std::find_if(c.begin(), c.end(),
                                   [&](int u) { return d.at(u) == f; });
            steps.push_back({Rule::decode, rat(1), cur2, 0, *it, l, {}});
            cur2 |= wbit(gs, f);
        }
        steps.push_back({Rule::fileclose, rat(1), cur2, 0, 0, 0, {}});
    }
    return steps;
}

std::vector<int> shift_permutation(int k, int s)
{
    std::vector<int> perm(k);
    for (int l = 1; l <= k; ++l)
        perm[l - 1] = ((l - 1 - s) % k + k) % k + 1;
    return perm;
}

std::vector<int> matching_permutation(const Demand& d_from, const Demand& d_to,
                                      const UserSet& fixed)
{
    const int k = d_from.size();
    if (d_to.size() != k)
        throw StepError("matching permutation: demand sizes differ");
    std::vector<int> perm(k, 0);
    std::vector<bool> taken(k + 1, false);
    for (int u : fixed) {
        if (d_from.at(u) != d_to.at(u))
            throw StepError("matching permutation: user U" + std::to_string(u) +
                            " requests different files in the two demands");
        perm[u - 1] = u;
        taken[u] = true;
    }
    // Off the fixed set, pair equal requests ascending.
    for (int f = 1; f <= *std::max_element(d_from.requests.begin(),
                                           d_from.requests.end());
         ++f) {
        std::vector<int> from_pos, to_pos;
        for (int u = 1; u <= k; ++u) {
            if (set_contains(fixed, u))
                continue;
            if (d_from.at(u) == f)
                from_pos.push_back(u);
            if (d_to.at(u) == f)
                to_pos.push_back(u);
        }
        if (from_pos.size() != to_pos.size())
            throw StepError("matching permutation: request multiplicities differ for W" +
                            std::to_string(f));
        for (std::size_t i = 0; i < from_pos.size(); ++i) {
            perm[from_pos[i] - 1] = to_pos[i];
            taken[to_pos[i]] = true;
        }
    }
    for (int u = 1; u <= k; ++u)
        if (perm[u - 1] == 0)
            throw StepError("matching permutation: user U" + std::to_string(u) +
                            " left unmapped");
    return perm;
}

namespace {

// Emits steps while replaying them, so wiring mistakes surface immediately
// with the step that caused them.
class ChainBuilder {
public:
    explicit ChainBuilder(const GroundSet& gs) : gs_(gs) {}

    void set_start(const ProofChain& chain) { expr_ = chain_start(chain); }

    void push(ProofStep step)
    {
        expr_ = apply_step(gs_, std::move(expr_), step);
        steps_.push_back(std::move(step));
    }

    void push_all(std::vector<ProofStep> steps)
    {
        for (auto& s : steps)
            push(std::move(s));
    }

    void submod(std::uint32_t s, std::uint32_t t)
    {
        push({Rule::submod, rat(1), s, t, 0, 0, {}});
    }

    // Merges the group's caches and its broadcast into one joint term,
    // returning the final mask.
    std::uint32_t merge_group(const UserSet& users, int demand)
    {
        std::uint32_t cur = 0;
        for (int u : users) {
            if (cur == 0) {
                cur = zbit(gs_, u);
                continue;
            }
            submod(cur, zbit(gs_, u));
            cur |= zbit(gs_, u);
        }
        if (cur == 0)
            return xbit(gs_, demand);
        submod(cur, xbit(gs_, demand));
        return cur | xbit(gs_, demand);
    }

    // DECODEs W_1..W_{N-1} into the term using the users of the group.
    std::uint32_t decode_w_prefix(std::uint32_t term, const UserSet& users, int demand)
    {
        const Demand& d = gs_.demands[demand - 1];
        for (int f = 1; f < gs_.cfg.n_files; ++f) {
            if (term & wbit(gs_, f))
                continue;
            auto it = std::find_if(users.begin(), users.end(),
                                   [&](int u) { return d.at(u) == f; });
            if (it == users.end())
                throw ChainError("no user in the group requests W" +
                                 std::to_string(f) + " in demand " +
                                 std::to_string(demand));
            push({Rule::decode, rat(1), term, 0, *it, demand, {}});
            term |= wbit(gs_, f);
        }
        return term;
    }

    void mono(std::uint32_t s, std::uint32_t keep)
    {
        if (s == keep)
            return;
        push({Rule::mono, rat(1), s, keep, 0, 0, {}});
    }

    std::vector<ProofStep> take() { return std::move(steps_); }
    const EntropyExpression& expr() const { return expr_; }

private:
    const GroundSet& gs_;
    std::vector<ProofStep> steps_;
    EntropyExpression expr_;
};

constexpr int kChainVariableCap = 30;

} // namespace

ProofChain build_theorem1_chain(const NetworkConfig& cfg, bool force)
{
    const int n = cfg.n_files;
    const int k = cfg.n_users;
    if (!force && cfg.regime() != CaseTag::one)
        throw DomainError("theorem 1 chain needs a case-I network");

    ProofChain chain;
    chain.gs = build_ground_set(cfg, demand_family(cfg, CaseTag::one), kChainVariableCap);
    const GroundSet& gs = chain.gs;
    chain.claimed = theorem1_bound(cfg, force);

    std::vector<UserSet> ab(n + 1), ce(k - n + 1), a_or_e(n + 1), bsets(n + 2);
    for (int i = 1; i <= n; ++i) {
        CaseOneSets sets = set_family_case1(cfg, i);
        ab[i] = set_union(sets.a, sets.b);
        a_or_e[i] = set_union(sets.a, sets.e);
        bsets[i] = sets.b;
    }
    bsets[n + 1] = set_family_case1(cfg, 1).e; // B_{K-N+1} = E
    for (int i = 1; i <= k - n; ++i) {
        CaseOneSets sets = set_family_case1(cfg, i);
        ce[i] = set_union(sets.c, sets.e);
    }

    chain.cache_weights.assign(k, rat(0));
    chain.demand_weights.assign(gs.demands.size(), rat(0));
    for (int i = 1; i <= n; ++i) {
        for (int u : ab[i])
            chain.cache_weights[u - 1] += 1;
        chain.demand_weights[i - 1] += 1;
    }
    for (int i = 1; i <= k - n; ++i) {
        for (int u : ce[i])
            chain.cache_weights[u - 1] += 1;
        chain.demand_weights[i - 1] += 1;
    }

    ChainBuilder builder(gs);
    builder.set_start(chain);

    std::uint32_t w = wprefix(gs, n - 1);
    for (int i = 1; i <= n; ++i) {
        std::uint32_t term = builder.merge_group(ab[i], i);
        builder.decode_w_prefix(term, ab[i], i);
    }
    for (int i = 1; i <= k - n; ++i) {
        std::uint32_t term = builder.merge_group(ce[i], i);
        builder.decode_w_prefix(term, ce[i], i);
    }
    // Exchange Z_{A|B} x Z_{C|E} into Z_{A|E} x Z_{B|C}.
    for (int i = 1; i <= k - n; ++i)
        builder.submod(w | zmask(gs, ab[i]) | xbit(gs, i),
                       w | zmask(gs, ce[i]) | xbit(gs, i));

    builder.mono(w | zmask(gs, a_or_e[1]) | xbit(gs, 1), w | zmask(gs, a_or_e[1]));

    // First telescope across the C|E groups.
    if (k - n >= 2) {
        std::vector<UserSet> anchors(a_or_e.begin() + 1, a_or_e.begin() + (k - n) + 1);
        builder.push_all(macro_sum_increment(gs, anchors, 1, k - n));
    }
    // Second telescope across the remaining A|B groups.
    {
        int l_eff = std::max(k - n, 1);
        std::vector<UserSet> anchors, terms;
        for (int i = l_eff; i <= n; ++i)
            anchors.push_back(a_or_e[i]);
        for (int i = l_eff + 1; i <= n; ++i)
            terms.push_back(ab[i]);
        builder.push_all(macro_sum_increment(gs, anchors, terms, l_eff, n));
    }
    if (k - n >= 1) {
        for (int i = 1; i <= k - n; ++i) {
            CaseOneSets sets = set_family_case1(cfg, i);
            std::uint32_t bc = w | zmask(gs, set_union(sets.b, sets.c)) | xbit(gs, i);
            builder.mono(bc, w | zmask(gs, sets.b) | xbit(gs, i));
        }
        for (int i = 1; i <= k - n; ++i) {
            const UserSet& b = bsets[i];
            std::vector<int> perm =
                b.empty() ? shift_permutation(k, n)
                          : matching_permutation(gs.demands[i - 1],
                                                 gs.demands[n + i - 1], b);
            builder.push({Rule::symm, rat(1), w | zmask(gs, b) | xbit(gs, i), 0, 0, 0,
                          std::move(perm)});
        }
        std::vector<UserSet> tsets(bsets.begin() + 1, bsets.begin() + (k - n) + 1);
        std::vector<int> didx;
        for (int i = 1; i <= k - n; ++i)
            didx.push_back(n + i);
        builder.push_all(macro_sum_decrement(gs, tsets, didx));
    }
    if (n >= 2)
        builder.push({Rule::const_floor, rat(1), w, 0, 0, 0, {}});

    chain.steps = builder.take();
    return chain;
}

ProofChain build_theorem2_chain(const NetworkConfig& cfg, bool force)
{
    const int n = cfg.n_files;
    const int k = cfg.n_users;
    if (!force && cfg.regime() != CaseTag::two)
        throw DomainError("theorem 2 chain needs a case-II network");
    if (n == 1)
        throw DomainError("theorem 2's chain requires N >= 2: with a single file "
                          "the case-2 reduction cannot close its W1 context term");

    ProofChain chain;
    chain.gs = build_ground_set(cfg, demand_family(cfg, CaseTag::two), kChainVariableCap);
    const GroundSet& gs = chain.gs;
    chain.claimed = theorem2_bound(cfg, force);

    std::vector<CaseTwoHeadSets> head(n + 1);
    for (int i = 1; i <= n; ++i)
        head[i] = case2_head_sets(cfg, i);
    std::vector<CaseTwoTailSets> tail(k + 1);
    for (int j = 2 * n; j <= k; ++j)
        tail[j] = case2_tail_sets(cfg, j);

    chain.cache_weights.assign(k, rat(0));
    chain.demand_weights.assign(gs.demands.size(), rat(0));
    auto add_users = [&](const UserSet& users, int copies = 1) {
        for (int u : users)
            chain.cache_weights[u - 1] += copies;
    };
    for (int i = 1; i <= n; ++i) {
        const auto& h = head[i];
        int g = static_cast<int>(h.g.size());
        add_users(set_union(h.a, h.b));
        add_users(h.g);
        add_users(h.i_set, g);
        chain.demand_weights[i - 1] += 1 + g;
    }
    for (int i = 1; i < n; ++i) {
        add_users(set_union(head[i].b, head[i].f));
        chain.demand_weights[i - 1] += 1;
    }
    for (int j = 2 * n; j <= k; ++j) {
        const auto& t = tail[j];
        add_users(t.p);
        add_users(t.q);
        add_users(t.s, j - 2 * n);
        chain.demand_weights[j - 1] += 1 + (j - 2 * n);
    }

    ChainBuilder builder(gs);
    builder.set_start(chain);
    std::uint32_t w = wprefix(gs, n - 1);

    for (int i = 1; i <= n; ++i) {
        UserSet group = set_union(head[i].a, head[i].b);
        std::uint32_t term = builder.merge_group(group, i);
        builder.decode_w_prefix(term, group, i);
    }
    for (int i = 1; i < n; ++i) {
        UserSet group = set_union(head[i].b, head[i].f);
        std::uint32_t term = builder.merge_group(group, i);
        builder.decode_w_prefix(term, group, i);
    }
    // |G_i| joint copies of the I_i caches.
    for (int i = 1; i <= n; ++i)
        for (std::size_t copy = 0; copy < head[i].g.size(); ++copy) {
            std::uint32_t cur = 0;
            for (int u : head[i].i_set) {
                if (cur == 0) {
                    cur = zbit(gs, u);
                    continue;
                }
                builder.submod(cur, zbit(gs, u));
                cur |= zbit(gs, u);
            }
        }
    for (int i = 1; i <= n; ++i)
        builder.push_all(macro_case2_reduction(gs, set_union(head[i].a, head[i].b),
                                               head[i].g, head[i].i_set, i));
    // Exchange into L_i and B_i terms.
    for (int i = 1; i < n; ++i) {
        UserSet abg = set_union(set_union(head[i].a, head[i].b), head[i].g);
        builder.submod(w | zmask(gs, abg) | xbit(gs, i),
                       w | zmask(gs, set_union(head[i].b, head[i].f)) | xbit(gs, i));
    }
    builder.mono(w | zmask(gs, head[1].l_set) | xbit(gs, 1),
                 w | zmask(gs, head[1].l_set));
    {
        std::vector<UserSet> anchors;
        for (int i = 1; i <= n; ++i)
            anchors.push_back(head[i].l_set);
        builder.push_all(macro_sum_increment(gs, anchors, 1, n));
    }
    for (int i = 1; i < n; ++i) {
        const UserSet& b = head[i].b;
        std::vector<int> perm =
            b.empty() ? shift_permutation(k, n)
                      : matching_permutation(gs.demands[i - 1], gs.demands[n + i - 1], b);
        builder.push({Rule::symm, rat(1), w | zmask(gs, b) | xbit(gs, i), 0, 0, 0,
                      std::move(perm)});
    }
    if (k >= 2 * n) {
        for (int j = 2 * n; j <= k; ++j)
            for (int copy = 0; copy < j - 2 * n; ++copy) {
                std::uint32_t cur = 0;
                for (int u : tail[j].s) {
                    if (cur == 0) {
                        cur = zbit(gs, u);
                        continue;
                    }
                    builder.submod(cur, zbit(gs, u));
                    cur |= zbit(gs, u);
                }
            }
        for (int j = 2 * n; j <= k; ++j) {
            std::uint32_t term = builder.merge_group(tail[j].p, j);
            builder.decode_w_prefix(term, tail[j].p, j);
            builder.push_all(
                macro_case2_reduction(gs, tail[j].p, tail[j].q, tail[j].s, j));
        }
        std::vector<UserSet> tsets;
        std::vector<int> didx;
        for (int j = 2 * n; j <= k; ++j) {
            tsets.push_back(tail[j].t);
            didx.push_back(j);
        }
        builder.push_all(macro_sum_decrement(gs, tsets, didx));
    }
    {
        std::vector<UserSet> tsets;
        std::vector<int> didx;
        for (int i = 1; i < n; ++i) {
            tsets.push_back(head[i].b);
            didx.push_back(n + i);
        }
        builder.push_all(macro_sum_decrement(gs, tsets, didx));
    }
    builder.push({Rule::const_floor, rat(1), w, 0, 0, 0, {}});

    chain.steps = builder.take();
    return chain;
}

namespace {

void add_mult(std::map<std::string, Rational>& mult, const std::string& id,
              const Rational& w)
{
    if (w != 0)
        mult[id] += w;
}

// H(S)+H(T) >= H(S|T)+H(S&T) as a sum of elemental rows.
void expand_submod(const LpProblem& lp, std::uint32_t s, std::uint32_t t,
                   const Rational& w, std::map<std::string, Rational>& mult)
{
    std::uint32_t only_s = s & ~t;
    std::uint32_t only_t = t & ~s;
    if (only_s == 0 || only_t == 0)
        return; // nested: nothing to prove
    std::uint32_t base = s & t;
    std::vector<int> a_vars, b_vars;
    for (int v = 0; v < lp.gs.n_vars(); ++v) {
        if (only_s >> v & 1u)
            a_vars.push_back(v);
        if (only_t >> v & 1u)
            b_vars.push_back(v);
    }
    for (std::size_t ai = 0; ai < a_vars.size(); ++ai)
        for (std::size_t bi = 0; bi < b_vars.size(); ++bi) {
            std::uint32_t context = base;
            for (std::size_t x = 0; x < ai; ++x)
                context |= 1u << a_vars[x];
            for (std::size_t x = 0; x < bi; ++x)
                context |= 1u << b_vars[x];
            int row = lp.submod_row(a_vars[ai], b_vars[bi], context);
            if (row < 0)
                throw CertificateError("missing elemental row for (" +
                                       lp.gs.var_name(a_vars[ai]) + "," +
                                       lp.gs.var_name(b_vars[bi]) + " | " +
                                       lp.gs.subset_name(context) + ")");
            add_mult(mult, lp.constraints[row].id, w);
        }
}

// H(S) - H(K) >= 0 for K subset of S (K may be empty) via elementals.
void expand_mono(const LpProblem& lp, std::uint32_t s, std::uint32_t keep,
                 const Rational& w, std::map<std::string, Rational>& mult)
{
    std::uint32_t full = lp.gs.full_mask();
    std::uint32_t target = keep;
    if (keep == 0) {
        // Reduce to a singleton, then use its nonnegativity.
        target = s & (~s + 1); // lowest bit
    }
    std::uint32_t cur = s;
    for (int v = lp.gs.n_vars() - 1; v >= 0; --v) {
        std::uint32_t bit = 1u << v;
        if (!(cur & bit) || (target & bit))
            continue;
        // H(cur) - H(cur\v) = submod(cur, full\v) + mono(v)
        std::uint32_t rest = full & ~bit;
        if (cur != full)
            expand_submod(lp, cur, rest, w, mult);
        int row = lp.mono_row(v);
        if (row < 0)
            throw CertificateError("missing monotonicity row for " + lp.gs.var_name(v));
        add_mult(mult, lp.constraints[row].id, w);
        cur &= ~bit;
    }
    if (keep == 0) {
        // H({v}) >= 0.
        int v = __builtin_ctz(target);
        std::uint32_t rest = full & ~target;
        if (rest)
            expand_submod(lp, target, rest, w, mult);
        int row = lp.mono_row(v);
        add_mult(mult, lp.constraints[row].id, w);
    }
}

} // namespace

DualCertificate chain_to_certificate(const ProofChain& chain, const LpProblem& lp)
{
    const GroundSet& gs = chain.gs;
    if (gs.cfg.n_files != lp.gs.cfg.n_files || gs.cfg.n_users != lp.gs.cfg.n_users ||
        gs.demands != lp.gs.demands)
        throw CertificateError("chain and LP are over different ground sets");

    std::map<std::string, Rational> mult;
    for (int l = 1; l <= gs.cfg.n_users; ++l)
        if (chain.cache_weights[l - 1] != 0)
            add_mult(mult, lp.constraints[lp.cache_row(l)].id,
                     chain.cache_weights[l - 1]);
    for (std::size_t j = 1; j <= gs.demands.size(); ++j)
        if (chain.demand_weights[j - 1] != 0)
            add_mult(mult, lp.constraints[lp.broadcast_row(static_cast<int>(j))].id,
                     chain.demand_weights[j - 1]);

    for (std::size_t i = 0; i < chain.steps.size(); ++i) {
        const ProofStep& step = chain.steps[i];
        const Rational& w = step.weight;
        try {
            switch (step.rule) {
            case Rule::submod:
                expand_submod(lp, step.subset, step.other, w, mult);
                break;
            case Rule::decode: {
                int f = gs.demands[step.demand - 1].at(step.user);
                std::uint32_t small =
                    (1u << gs.cache_var(step.user)) | (1u << gs.demand_var(step.demand));
                std::uint32_t small_w = small | (1u << gs.file_var(f));
                int row = lp.decode_row(step.user, step.demand);
                if (row < 0)
                    throw CertificateError("missing decode row");
                // H(S) - H(S|W) = submod(S, {W,Z,X}) + [H(ZX) - H(WZX)]
                if (step.subset != small)
                    expand_submod(lp, step.subset, small_w, w, mult);
                add_mult(mult, lp.constraints[row].id + "~", w);
                break;
            }
            case Rule::fileclose: {
                std::uint32_t files = gs.files_mask();
                expand_mono(lp, step.subset, files, w, mult);
                int row = lp.file_row(files);
                add_mult(mult, lp.constraints[row].id, w);
                break;
            }
            case Rule::const_floor: {
                int row = lp.file_row(step.subset);
                if (row < 0)
                    throw CertificateError("missing file-independence row for " +
                                           gs.subset_name(step.subset));
                add_mult(mult, lp.constraints[row].id, w);
                break;
            }
            case Rule::mono:
                expand_mono(lp, step.subset, step.other, w, mult);
                break;
            case Rule::symm: {
                if (lp.orbit_rep.empty() || !lp.options.symmetry)
                    throw CertificateError("SYMM step needs the LP's symmetry "
                                           "constraints enabled");
                // Recompute the image subset exactly as apply_step does.
                std::uint32_t out = step.subset & gs.files_mask();
                for (int l = 1; l <= gs.cfg.n_users; ++l)
                    if (step.subset & (1u << gs.cache_var(l)))
                        out |= 1u << gs.cache_var(step.perm[l - 1]);
                for (std::size_t j = 1; j <= gs.demands.size(); ++j) {
                    if (!(step.subset & (1u << gs.demand_var(static_cast<int>(j)))))
                        continue;
                    Demand mapped =
                        apply_user_permutation(gs.demands[j - 1], step.perm);
                    auto idx = gs.demand_index(mapped);
                    if (!idx)
                        throw CertificateError("SYMM image demand not listed");
                    out |= 1u << gs.demand_var(*idx);
                }
                if (out == step.subset)
                    break;
                std::uint32_t rep_s = lp.orbit_rep[step.subset];
                std::uint32_t rep_o = lp.orbit_rep[out];
                if (rep_s != rep_o)
                    throw CertificateError(
                        "SYMM permutation is outside the LP's orbit structure: " +
                        gs.subset_name(step.subset) + " and " + gs.subset_name(out) +
                        " sit in different orbits");
                // H(S) - H(S') = [H(S) - H(rep)] + [H(rep) - H(S')].
                if (step.subset != rep_s) {
                    int row = lp.symmetry_row(step.subset);
                    add_mult(mult, lp.constraints[row].id, w);
                }
                if (out != rep_o) {
                    int row = lp.symmetry_row(out);
                    add_mult(mult, lp.constraints[row].id + "~", w);
                }
                break;
            }
            }
        } catch (const CertificateError& e) {
            throw CertificateError("step " + std::to_string(i + 1) + " (" +
                                   to_string(step.rule) + "): " + e.what());
        }
    }

    // Net opposite orientations of equality rows.
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
    cert.implied = verify_certificate(lp, cert);
    if (cert.implied.m_coeff != chain.claimed.m_coeff ||
        cert.implied.r_coeff != chain.claimed.r_coeff ||
        cert.implied.rhs != chain.claimed.rhs)
        throw CertificateError("certificate implies " + to_string(cert.implied.m_coeff) +
                               "M + " + to_string(cert.implied.r_coeff) + "R >= " +
                               to_string(cert.implied.rhs) +
                               ", chain claimed a different bound");
    return cert;
}

std::string chain_to_transcript(const ProofChain& chain)
{
    const GroundSet& gs = chain.gs;
    std::ostringstream out;
    out << "cachekit-proof v1\n";
    out << "network " << gs.cfg.n_files << " " << gs.cfg.n_users << "\n";
    for (auto& d : gs.demands)
        out << "demand " << to_string(d) << "\n";
    out << "claim a=" << to_string(chain.claimed.m_coeff)
        << " b=" << to_string(chain.claimed.r_coeff)
        << " c=" << to_string(chain.claimed.rhs) << " origin=" << chain.claimed.origin
        << "\n";
    for (int l = 1; l <= gs.cfg.n_users; ++l)
        if (chain.cache_weights[l - 1] != 0)
            out << "weight Z" << l << " " << to_string(chain.cache_weights[l - 1])
                << "\n";
    for (std::size_t j = 1; j <= gs.demands.size(); ++j)
        if (chain.demand_weights[j - 1] != 0)
            out << "weight X" << j << " " << to_string(chain.demand_weights[j - 1])
                << "\n";
    for (auto& step : chain.steps) {
        out << "step " << to_string(step.rule) << " w=" << to_string(step.weight)
            << " s=" << gs.subset_name(step.subset);
        switch (step.rule) {
        case Rule::submod:
            out << " t=" << gs.subset_name(step.other);
            break;
        case Rule::mono:
            out << " keep=" << gs.subset_name(step.other);
            break;
        case Rule::decode:
            out << " user=" << step.user << " demand=" << step.demand;
            break;
        case Rule::symm: {
            out << " perm=";
            for (std::size_t i = 0; i < step.perm.size(); ++i)
                out << (i ? "," : "") << step.perm[i];
            break;
        }
        default:
            break;
        }
        out << "\n";
    }
    return out.str();
}

namespace {

Rule rule_from_string(const std::string& name)
{
    if (name == "SUBMOD")
        return Rule::submod;
    if (name == "DECODE")
        return Rule::decode;
    if (name == "FILECLOSE")
        return Rule::fileclose;
    if (name == "SYMM")
        return Rule::symm;
    if (name == "MONO")
        return Rule::mono;
    if (name == "CONST")
        return Rule::const_floor;
    throw ChainError("unknown rule '" + name + "'");
}

std::vector<int> parse_int_list(const std::string& text)
{
    std::vector<int> out;
    std::istringstream in(text);
    std::string token;
    while (std::getline(in, token, ','))
        out.push_back(std::stoi(token));
    return out;
}

} // namespace

ProofChain chain_from_transcript(const std::string& text)
{
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != "cachekit-proof v1")
        throw ChainError("transcript header missing 'cachekit-proof v1'");

    ProofChain chain;
    NetworkConfig cfg{};
    std::vector<Demand> demands;
    bool have_network = false;
    std::vector<std::pair<std::string, Rational>> weights;
    std::vector<std::vector<std::pair<std::string, std::string>>> raw_steps;
    std::vector<std::string> raw_rules;

    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#')
            continue;
        std::istringstream ls(line);
        std::string kind;
        ls >> kind;
        if (kind == "network") {
            int n, k;
            ls >> n >> k;
            cfg = make_config(n, k);
            have_network = true;
        } else if (kind == "demand") {
            std::string d;
            ls >> d;
            demands.push_back(demand_from_string(d, cfg));
        } else if (kind == "claim") {
            std::string token;
            std::map<std::string, std::string> kv;
            while (ls >> token) {
                auto eq = token.find('=');
                kv[token.substr(0, eq)] = token.substr(eq + 1);
            }
            chain.claimed = LinearBound{parse_rational(kv.at("a")),
                                        parse_rational(kv.at("b")),
                                        parse_rational(kv.at("c")),
                                        kv.count("origin") ? kv.at("origin") : ""};
        } else if (kind == "weight") {
            std::string var, value;
            ls >> var >> value;
            weights.push_back({var, parse_rational(value)});
        } else if (kind == "step") {
            std::string rule, token;
            ls >> rule;
            std::vector<std::pair<std::string, std::string>> kv;
            while (ls >> token) {
                auto eq = token.find('=');
                kv.push_back({token.substr(0, eq), token.substr(eq + 1)});
            }
            raw_rules.push_back(rule);
            raw_steps.push_back(std::move(kv));
        } else {
            throw ChainError("unknown transcript line '" + line + "'");
        }
    }
    if (!have_network)
        throw ChainError("transcript has no network line");
    chain.gs = build_ground_set(cfg, demands, 30);
    chain.cache_weights.assign(cfg.n_users, rat(0));
    chain.demand_weights.assign(chain.gs.demands.size(), rat(0));
    for (auto& [var, value] : weights) {
        int idx = std::stoi(var.substr(1));
        if (var[0] == 'Z')
            chain.cache_weights.at(idx - 1) = value;
        else if (var[0] == 'X')
            chain.demand_weights.at(idx - 1) = value;
        else
            throw ChainError("weight line must name Z<l> or X<j>");
    }
    for (std::size_t i = 0; i < raw_steps.size(); ++i) {
        ProofStep step;
        step.rule = rule_from_string(raw_rules[i]);
        for (auto& [key, value] : raw_steps[i]) {
            if (key == "w")
                step.weight = parse_rational(value);
            else if (key == "s")
                step.subset = chain.gs.subset_from_name(value);
            else if (key == "t" || key == "keep")
                step.other = chain.gs.subset_from_name(value);
            else if (key == "user")
                step.user = std::stoi(value);
            else if (key == "demand")
                step.demand = std::stoi(value);
            else if (key == "perm")
                step.perm = parse_int_list(value);
            else
                throw ChainError("unknown step field '" + key + "'");
        }
        chain.steps.push_back(std::move(step));
    }
    return chain;
}

std::string chain_to_json(const ProofChain& chain)
{
    const GroundSet& gs = chain.gs;
    json j;
    j["format_version"] = 1;
    j["n"] = gs.cfg.n_files;
    j["k"] = gs.cfg.n_users;
    json demands = json::array();
    for (auto& d : gs.demands)
        demands.push_back(to_string(d));
    j["demands"] = demands;
    j["claim"] = {{"a", to_string(chain.claimed.m_coeff)},
                  {"b", to_string(chain.claimed.r_coeff)},
                  {"c", to_string(chain.claimed.rhs)},
                  {"origin", chain.claimed.origin}};
    json cw = json::array(), dw = json::array();
    for (auto& w : chain.cache_weights)
        cw.push_back(to_string(w));
    for (auto& v : chain.demand_weights)
        dw.push_back(to_string(v));
    j["cache_weights"] = cw;
    j["demand_weights"] = dw;
    json steps = json::array();
    for (auto& step : chain.steps) {
        json s;
        s["rule"] = to_string(step.rule);
        s["w"] = to_string(step.weight);
        s["s"] = gs.subset_name(step.subset);
        if (step.rule == Rule::submod)
            s["t"] = gs.subset_name(step.other);
        if (step.rule == Rule::mono)
            s["keep"] = gs.subset_name(step.other);
        if (step.rule == Rule::decode) {
            s["user"] = step.user;
            s["demand"] = step.demand;
        }
        if (step.rule == Rule::symm)
            s["perm"] = step.perm;
        steps.push_back(std::move(s));
    }
    j["steps"] = steps;
    return j.dump(2);
}

ProofChain chain_from_json(const std::string& text)
{
    json j = json::parse(text);
    NetworkConfig cfg = make_config(j.at("n").get<int>(), j.at("k").get<int>());
    std::vector<Demand> demands;
    for (auto& d : j.at("demands"))
        demands.push_back(demand_from_string(d.get<std::string>(), cfg));
    ProofChain chain;
    chain.gs = build_ground_set(cfg, demands, 30);
    chain.claimed = LinearBound{parse_rational(j.at("claim").at("a").get<std::string>()),
                                parse_rational(j.at("claim").at("b").get<std::string>()),
                                parse_rational(j.at("claim").at("c").get<std::string>()),
                                j.at("claim").value("origin", "")};
    for (auto& w : j.at("cache_weights"))
        chain.cache_weights.push_back(parse_rational(w.get<std::string>()));
    for (auto& v : j.at("demand_weights"))
        chain.demand_weights.push_back(parse_rational(v.get<std::string>()));
    for (auto& s : j.at("steps")) {
        ProofStep step;
        step.rule = rule_from_string(s.at("rule").get<std::string>());
        step.weight = parse_rational(s.at("w").get<std::string>());
        step.subset = chain.gs.subset_from_name(s.at("s").get<std::string>());
        if (s.contains("t"))
            step.other = chain.gs.subset_from_name(s.at("t").get<std::string>());
        if (s.contains("keep"))
            step.other = chain.gs.subset_from_name(s.at("keep").get<std::string>());
        if (s.contains("user"))
            step.user = s.at("user").get<int>();
        if (s.contains("demand"))
            step.demand = s.at("demand").get<int>();
        if (s.contains("perm"))
            step.perm = s.at("perm").get<std::vector<int>>();
        chain.steps.push_back(std::move(step));
    }
    return chain;
}

} // namespace cachekit
