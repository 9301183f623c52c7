#pragma once

#include <string>
#include <vector>

#include "cachekit/rational.hpp"

namespace cachekit {

// Regime split at N = ceil((K+1)/2). The classifier puts the boundary in
// case one; operations that care accept an explicit override.
enum class CaseTag { one, two };

std::string to_string(CaseTag tag);

struct NetworkConfig {
    int n_files = 0; // N
    int n_users = 0; // K

    CaseTag regime() const;
    // True when N == ceil((K+1)/2), where both theorem evaluators apply.
    bool on_case_boundary() const;
};

// Throws DomainError naming the violated inequality unless 1 <= N <= K.
NetworkConfig make_config(int n_files, int n_users);

// A request vector: entry l is the file index (1..N) wanted by user l.
struct Demand {
    std::vector<int> requests;

    int size() const { return static_cast<int>(requests.size()); }
    int at(int user) const { return requests.at(user - 1); } // 1-based
    bool operator==(const Demand&) const = default;
};

std::string to_string(const Demand& d);
Demand demand_from_string(std::string_view text, const NetworkConfig& cfg);

// Sorted 1-based user indices.
using UserSet = std::vector<int>;

UserSet set_union(const UserSet& a, const UserSet& b);
UserSet set_intersection(const UserSet& a, const UserSet& b);
bool set_contains(const UserSet& s, int user);

// d1 for the regime: case one is (1..N, 1..K-N); case two is
// (1..N, 1..N-1, 1 repeated K-2N+1 times). Rejects shapes that do not fit,
// e.g. case one with K > 2N.
Demand base_demand(const NetworkConfig& cfg, CaseTag tag);

// Entry k of the result is entry ((k-1+shift) mod K)+1 of the input.
Demand cyclic_shift(const Demand& d, int shift);

// Element l (1-based) is base_demand shifted left l-1 times.
std::vector<Demand> demand_family(const NetworkConfig& cfg, CaseTag tag);

// The user that requests file N in demand d_l: N+1-l for l <= N, else K+N+1-l.
int target_user_index(const NetworkConfig& cfg, int l);

struct CaseOneSets {
    UserSet a, b, c, e;
};

// Index ranges for A_i, B_i, C_i, E; out-of-range ends clamp to [1, K] and
// inverted ranges are empty.
CaseOneSets set_family_case1(const NetworkConfig& cfg, int i);

struct CaseTwoSets {
    UserSet a, b, f, g, j, k; // indexed by i in [N]
    UserSet i_set;            // the N-1 users covering files 2..N in d_i
    UserSet l_set;            // A_i | B_i | F_i | G_i
    UserSet p, q, s, t;       // indexed by j in [2N..K]
};

CaseTwoSets set_family_case2(const NetworkConfig& cfg, int i, int j);

// Helpers for the two halves of the case-two table.
struct CaseTwoHeadSets {
    UserSet a, b, f, g, j, k, i_set, l_set;
};
struct CaseTwoTailSets {
    UserSet p, q, s, t;
};
CaseTwoHeadSets case2_head_sets(const NetworkConfig& cfg, int i);
CaseTwoTailSets case2_tail_sets(const NetworkConfig& cfg, int j);

// perm[l-1] = pi(l). Output entry pi(l) equals input entry l.
Demand apply_user_permutation(const Demand& d, const std::vector<int>& perm);

bool is_permutation_of_users(const std::vector<int>& perm, int k);

// True iff every file 1..N appears somewhere in d (membership in D).
bool is_covering(const NetworkConfig& cfg, const Demand& d);

} // namespace cachekit
