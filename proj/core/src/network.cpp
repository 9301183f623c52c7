#include "cachekit/network.hpp"

#include <algorithm>
#include <sstream>

namespace cachekit {

namespace {

int case_boundary(int k)
{
    return (k + 2) / 2; // ceil((K+1)/2)
}

// {lo..hi} clamped into [1, K]; empty when inverted.
UserSet range_set(int lo, int hi, int k)
{
    UserSet out;
    lo = std::max(lo, 1);
    hi = std::min(hi, k);
    for (int u = lo; u <= hi; ++u)
        out.push_back(u);
    return out;
}

} // namespace

CaseTag NetworkConfig::regime() const
{
    return n_files >= case_boundary(n_users) ? CaseTag::one : CaseTag::two;
}

bool NetworkConfig::on_case_boundary() const
{
    return n_files == case_boundary(n_users);
}

std::string to_string(CaseTag tag)
{
    return tag == CaseTag::one ? "I" : "II";
}

NetworkConfig make_config(int n_files, int n_users)
{
    if (n_files < 1)
        throw DomainError("network requires 1 <= N, got N=" + std::to_string(n_files));
    if (n_users < 1)
        throw DomainError("network requires 1 <= K, got K=" + std::to_string(n_users));
    if (n_files > n_users)
        throw DomainError("network requires N <= K, got N=" + std::to_string(n_files) +
                          " > K=" + std::to_string(n_users));
    return NetworkConfig{n_files, n_users};
}

std::string to_string(const Demand& d)
{
    std::ostringstream out;
    for (std::size_t i = 0; i < d.requests.size(); ++i) {
        if (i)
            out << ',';
        out << d.requests[i];
    }
    return out.str();
}

Demand demand_from_string(std::string_view text, const NetworkConfig& cfg)
{
    Demand d;
    std::string token;
    std::istringstream in{std::string(text)};
    while (std::getline(in, token, ',')) {
        try {
            d.requests.push_back(std::stoi(token));
        } catch (const std::exception&) {
            throw DomainError("bad demand entry '" + token + "'");
        }
    }
    if (d.size() != cfg.n_users)
        throw DomainError("demand length " + std::to_string(d.size()) +
                          " != K=" + std::to_string(cfg.n_users));
    for (int r : d.requests)
        if (r < 1 || r > cfg.n_files)
            throw DomainError("demand entry " + std::to_string(r) + " outside 1..N");
    return d;
}

UserSet set_union(const UserSet& a, const UserSet& b)
{
    UserSet out;
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

UserSet set_intersection(const UserSet& a, const UserSet& b)
{
    UserSet out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

bool set_contains(const UserSet& s, int user)
{
    return std::binary_search(s.begin(), s.end(), user);
}

Demand base_demand(const NetworkConfig& cfg, CaseTag tag)
{
    const int n = cfg.n_files;
    const int k = cfg.n_users;
    Demand d;
    d.requests.reserve(k);
    if (tag == CaseTag::one) {
        if (k - n > n)
            throw DomainError("case I base demand needs K-N <= N, got (N,K)=(" +
                              std::to_string(n) + "," + std::to_string(k) + ")");
        for (int f = 1; f <= n; ++f)
            d.requests.push_back(f);
        for (int f = 1; f <= k - n; ++f)
            d.requests.push_back(f);
    } else {
        if (k - 2 * n + 1 < 0)
            throw DomainError("case II base demand needs K >= 2N-1, got (N,K)=(" +
                              std::to_string(n) + "," + std::to_string(k) + ")");
        for (int f = 1; f <= n; ++f)
            d.requests.push_back(f);
        for (int f = 1; f <= n - 1; ++f)
            d.requests.push_back(f);
        for (int r = 0; r < k - 2 * n + 1; ++r)
            d.requests.push_back(1);
    }
    return d;
}

Demand cyclic_shift(const Demand& d, int shift)
{
    const int k = d.size();
    Demand out;
    out.requests.resize(k);
    for (int pos = 1; pos <= k; ++pos)
        out.requests[pos - 1] = d.requests[((pos - 1 + shift) % k + k) % k];
    return out;
}

std::vector<Demand> demand_family(const NetworkConfig& cfg, CaseTag tag)
{
    Demand d1 = base_demand(cfg, tag);
    std::vector<Demand> family;
    family.reserve(cfg.n_users);
    for (int l = 0; l < cfg.n_users; ++l)
        family.push_back(cyclic_shift(d1, l));
    return family;
}

int target_user_index(const NetworkConfig& cfg, int l)
{
    if (l < 1 || l > cfg.n_users)
        throw DomainError("demand index l=" + std::to_string(l) + " outside 1..K");
    if (l <= cfg.n_files)
        return cfg.n_files + 1 - l;
    return cfg.n_users + cfg.n_files + 1 - l;
}

CaseOneSets set_family_case1(const NetworkConfig& cfg, int i)
{
    const int n = cfg.n_files;
    const int k = cfg.n_users;
    if (i < 1 || i > n)
        throw DomainError("case I set index i=" + std::to_string(i) + " outside 1..N");
    CaseOneSets out;
    out.a = range_set(1, n - i, k);
    out.b = range_set(k + 2 - i, k, k);
    out.c = range_set(k + 2 - n - i, n - i, k);
    out.e = range_set(n + 1, k, k);
    return out;
}

CaseTwoHeadSets case2_head_sets(const NetworkConfig& cfg, int i)
{
    const int n = cfg.n_files;
    const int k = cfg.n_users;
    if (i < 1 || i > n)
        throw DomainError("case II set index i=" + std::to_string(i) + " outside 1..N");
    CaseTwoHeadSets out;
    out.a = range_set(1, n - i, k);
    out.b = range_set(k - i + 2, k, k);
    out.f = range_set(n + 1, 2 * n - i, k);
    out.g = range_set(2 * n - i + 1, k - i + 1, k);
    out.j = range_set(1, n - i + 1, k);
    out.k = range_set(k - i + 3, k, k);
    // The users of J_i | K_i that request a file other than W_1 in d_i;
    // they cover exactly {W_2..W_N}. Plain J_i | K_i overshoots at i=1.
    Demand di = cyclic_shift(base_demand(cfg, CaseTag::two), i - 1);
    for (int u : set_union(out.j, out.k))
        if (di.at(u) != 1)
            out.i_set.push_back(u);
    out.l_set = set_union(set_union(out.a, out.b), set_union(out.f, out.g));
    return out;
}

CaseTwoTailSets case2_tail_sets(const NetworkConfig& cfg, int j)
{
    const int n = cfg.n_files;
    const int k = cfg.n_users;
    if (j < 2 * n || j > k)
        throw DomainError("case II set index j=" + std::to_string(j) + " outside 2N..K");
    CaseTwoTailSets out;
    out.p = range_set(k + n + 2 - j, k + 2 * n - j, k);
    out.q = range_set(k + 2 * n + 1 - j, k, k);
    // S_j spans the N-1 users that request W_2..W_N in d_j (the set table's
    // printed upper end overshoots by one); S_{2N} is empty by convention.
    out.s = j == 2 * n ? UserSet{} : range_set(k - j + 3, k + n - j + 1, k);
    out.t = set_union(out.p, out.q);
    return out;
}

CaseTwoSets set_family_case2(const NetworkConfig& cfg, int i, int j)
{
    CaseTwoHeadSets head = case2_head_sets(cfg, i);
    CaseTwoTailSets tail = case2_tail_sets(cfg, j);
    CaseTwoSets out;
    out.a = std::move(head.a);
    out.b = std::move(head.b);
    out.f = std::move(head.f);
    out.g = std::move(head.g);
    out.j = std::move(head.j);
    out.k = std::move(head.k);
    out.i_set = std::move(head.i_set);
    out.l_set = std::move(head.l_set);
    out.p = std::move(tail.p);
    out.q = std::move(tail.q);
    out.s = std::move(tail.s);
    out.t = std::move(tail.t);
    return out;
}

bool is_permutation_of_users(const std::vector<int>& perm, int k)
{
    if (static_cast<int>(perm.size()) != k)
        return false;
    std::vector<bool> seen(k, false);
    for (int v : perm) {
        if (v < 1 || v > k || seen[v - 1])
            return false;
        seen[v - 1] = true;
    }
    return true;
}

Demand apply_user_permutation(const Demand& d, const std::vector<int>& perm)
{
    const int k = d.size();
    if (!is_permutation_of_users(perm, k))
        throw DomainError("not a permutation of 1..K");
    Demand out;
    out.requests.resize(k);
    for (int l = 1; l <= k; ++l)
        out.requests[perm[l - 1] - 1] = d.at(l);
    return out;
}

bool is_covering(const NetworkConfig& cfg, const Demand& d)
{
    std::vector<bool> seen(cfg.n_files, false);
    for (int r : d.requests)
        if (r >= 1 && r <= cfg.n_files)
            seen[r - 1] = true;
    return std::all_of(seen.begin(), seen.end(), [](bool b) { return b; });
}

} // namespace cachekit
