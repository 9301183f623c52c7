#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "cachekit/bounds.hpp"
#include "cachekit/network.hpp"
#include "cachekit/rational.hpp"

namespace cachekit {

class LpError : public std::runtime_error {
public:
    explicit LpError(const std::string& what) : std::runtime_error(what) {}
};

class CertificateError : public std::runtime_error {
public:
    explicit CertificateError(const std::string& what) : std::runtime_error(what) {}
};

// LP random variables in a fixed order: W_1..W_N, Z_1..Z_K, then X_d per
// listed demand. Subsets are bitmasks over that order.
struct GroundSet {
    NetworkConfig cfg;
    std::vector<Demand> demands;

    int n_vars() const
    {
        return cfg.n_files + cfg.n_users + static_cast<int>(demands.size());
    }
    std::uint32_t full_mask() const { return (1u << n_vars()) - 1; }
    std::uint32_t files_mask() const { return (1u << cfg.n_files) - 1; }

    int file_var(int n) const { return n - 1; }
    int cache_var(int l) const { return cfg.n_files + l - 1; }
    int demand_var(int j) const { return cfg.n_files + cfg.n_users + j - 1; }

    std::string var_name(int v) const;
    std::string subset_name(std::uint32_t mask) const;
    std::uint32_t subset_from_name(const std::string& text) const;
    // 1-based index of d in the listed demands, if present.
    std::optional<int> demand_index(const Demand& d) const;
};

inline constexpr int kDefaultVariableCap = 12;

// Rejects ground sets with more than `cap` variables, naming the count.
GroundSet build_ground_set(const NetworkConfig& cfg, std::vector<Demand> demands,
                           int cap = kDefaultVariableCap);

struct LinTerm {
    std::uint32_t subset;
    Rational coeff;
};

enum class Rel { ge, eq };

// terms.h + m_coeff*M + r_coeff*R  (>= | ==)  rhs
struct Constraint {
    std::vector<LinTerm> terms; // sorted by subset, coefficients nonzero
    Rational m_coeff, r_coeff, rhs;
    Rel rel = Rel::ge;
    std::string tag;
    std::string id; // content hash, stable across runs and platforms
};

// n monotonicity rows H(V)-H(V\i) >= 0 plus C(n,2) 2^(n-2) submodularity
// rows, deduplicated.
std::vector<Constraint> elemental_inequalities(const GroundSet& gs);

// File independence H(W_A)=|A|, one closure row H(everything)=N, decode
// equalities per (user, listed demand), cache rows H(Z_l)<=M and broadcast
// rows H(X_d)<=R.
std::vector<Constraint> problem_constraints(const GroundSet& gs);

// A user permutation (optionally with a file permutation) that maps the
// listed demand multiset into itself; acts on ground variables.
struct SymmetryElement {
    std::vector<int> user_perm;          // pi, 1-based
    std::vector<int> file_perm;          // sigma, 1-based (identity if unused)
    std::vector<int> var_map;            // induced permutation of variables
    std::uint32_t apply(std::uint32_t mask) const;
};

// The full stabilizer group, found by scanning S_K (and S_N x S_K when
// with_file_perms). Enumeration is supported for K <= 8.
std::vector<SymmetryElement> symmetry_group(const GroundSet& gs, bool with_file_perms);

// H(S) = H(rep(S)) for every subset off its orbit representative, one per
// subset (orbit-deduplicated spanning set).
std::vector<Constraint> symmetry_constraints(const GroundSet& gs,
                                             bool with_file_perms = false);

struct LpOptions {
    bool symmetry = true;
    bool file_symmetry = false;
};

struct LpProblem {
    GroundSet gs;
    LpOptions options;
    std::vector<Constraint> constraints;
    std::vector<std::uint32_t> orbit_rep; // size 2^n; rep[mask] == mask if asymmetric

    const Constraint& by_id(const std::string& id) const;
    int index_of_id(const std::string& id) const; // -1 when absent

    // Lookups used by certificate construction.
    int mono_row(int var) const;
    int submod_row(int i, int j, std::uint32_t context) const;
    int decode_row(int user, int demand_idx) const;
    int file_row(std::uint32_t file_subset) const;
    int symmetry_row(std::uint32_t subset) const;
    int cache_row(int user) const;
    int broadcast_row(int demand_idx) const;
    int closure_row() const;

    std::string to_json() const;

private:
    friend LpProblem build_lp(const GroundSet&, const LpOptions&);
    std::unordered_map<std::string, int> id_index_;
    std::map<std::tuple<int, int, std::uint32_t>, int> submod_index_;
    std::map<int, int> mono_index_;
    std::map<std::pair<int, int>, int> decode_index_;
    std::map<std::uint32_t, int> file_index_;
    std::map<std::uint32_t, int> symmetry_index_;
    std::vector<int> cache_index_, broadcast_index_;
    int closure_index_ = -1;
};

LpProblem build_lp(const GroundSet& gs, const LpOptions& options = {});

// Nonnegative multipliers over constraint ids. An id may carry a trailing
// '~' to use an equality row in its reversed orientation.
struct DualCertificate {
    std::vector<std::pair<std::string, Rational>> multipliers;
    LinearBound implied;

    std::string to_json(const LpProblem& problem, const Rational& m,
                        const Rational& value) const;
};

// Recombines multipliers x constraints exactly; every entropy coefficient
// must cancel. Returns the implied a M + b R >= c.
LinearBound verify_certificate(const LpProblem& problem, const DualCertificate& cert);

struct SolveResult {
    Rational value;
    DualCertificate certificate;
    std::vector<Rational> entropy; // h[mask], index 0 (empty set) is 0
    long long pivots = 0;
};

// Exact min R at M = m over the problem's constraints. Infeasible and
// unbounded outcomes raise LpError with distinct messages; both indicate a
// modeling bug.
SolveResult solve_min_rate(const LpProblem& problem, const Rational& m);

// Round-trip helpers for the certificate file format.
std::string certificate_file_json(const LpProblem& problem, const DualCertificate& cert,
                                  const Rational& m, const Rational& value);
struct CertificateFile {
    NetworkConfig cfg;
    std::vector<Demand> demands;
    bool file_symmetry = false;
    Rational m, value;
    DualCertificate certificate;
};
CertificateFile certificate_from_json(const std::string& text);

} // namespace cachekit
