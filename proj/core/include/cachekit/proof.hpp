#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "cachekit/bounds.hpp"
#include "cachekit/entropy_lp.hpp"
#include "cachekit/network.hpp"
#include "cachekit/rational.hpp"

namespace cachekit {

class StepError : public std::runtime_error {
public:
    explicit StepError(const std::string& what) : std::runtime_error(what) {}
};

class ChainError : public std::runtime_error {
public:
    explicit ChainError(const std::string& what) : std::runtime_error(what) {}
};

// A rational combination of joint entropies over a ground set plus a
// constant. Keys are subset masks; zero coefficients are never stored.
struct EntropyExpression {
    std::map<std::uint32_t, Rational> terms;
    Rational constant;

    Rational coeff(std::uint32_t subset) const;
    void add(std::uint32_t subset, const Rational& delta);
    // Value against an entropy vector indexed by subset mask.
    Rational eval(const std::vector<Rational>& h) const;
    bool operator==(const EntropyExpression&) const = default;
};

enum class Rule { submod, decode, fileclose, symm, mono, const_floor };

std::string to_string(Rule rule);

// One checked inequality step. Every rule is value-preserving or
// value-decreasing on vectors satisfying the model constraints, so replaying
// a chain from its opening expression proves the claimed bound.
struct ProofStep {
    Rule rule = Rule::submod;
    Rational weight = rat(1);
    std::uint32_t subset = 0; // the term acted on
    std::uint32_t other = 0;  // SUBMOD: T; MONO: the kept subset
    int user = 0;             // DECODE
    int demand = 0;           // DECODE: demand index in the ground set
    std::vector<int> perm;    // SYMM: user permutation, perm[l-1] = pi(l)
};

// Applies one step; throws StepError naming the failed premise and term.
EntropyExpression apply_step(const GroundSet& gs, EntropyExpression expr,
                             const ProofStep& step);

struct ProofChain {
    GroundSet gs;
    std::vector<Rational> cache_weights;  // per user, multiplies H(Z_l)
    std::vector<Rational> demand_weights; // per listed demand, multiplies H(X_d)
    std::vector<ProofStep> steps;
    LinearBound claimed;
};

// The opening expression sum_l w_l H(Z_l) + sum_d v_d H(X_d).
EntropyExpression chain_start(const ProofChain& chain);

// Replays every step; the final expression must be the bare constant equal
// to the claim's right-hand side, with a = sum of cache weights and
// b = sum of demand weights.
LinearBound verify_chain(const ProofChain& chain);

// H(W_[N-1], Z_S, Z_bar) + H(W_[N-1], Z_T, X_dl) >= H(W_[N-1], Z_{S&T}) + N
// realized as SUBMOD + DECODE + FILECLOSE, where bar is the user requesting
// file N in demand l.
std::vector<ProofStep> macro_lemma_repeated(const GroundSet& gs, const UserSet& s,
                                            const UserSet& t, int l);

// Telescoping sum: anchors S_l..S_j with S_{i-1} = S_i + {bar(i)}, consumed
// terms T_{l+1}..T_j with S_i & T_i = S_i, demands l+1..j.
std::vector<ProofStep> macro_sum_increment(const GroundSet& gs,
                                           const std::vector<UserSet>& anchors,
                                           const std::vector<UserSet>& term_sets,
                                           int l, int j);
std::vector<ProofStep> macro_sum_increment(const GroundSet& gs,
                                           const std::vector<UserSet>& sets, int l,
                                           int j);

// Decreasing telescope over T_l..T_j with T_{i+1} = T_i + {bar(demand_i)};
// demand_indices[i] is the demand consumed together with T_{l+i}.
std::vector<ProofStep> macro_sum_decrement(const GroundSet& gs,
                                           const std::vector<UserSet>& tsets,
                                           const std::vector<int>& demand_indices);

// Lemma-style reduction: absorbs the W_1-requesting block B into A at the
// cost of |B| broadcasts, |B| cache copies of C and the |B| singles,
// yielding H(W_[N-1], Z_{A|B}, X_dl) + |B| N.
std::vector<ProofStep> macro_case2_reduction(const GroundSet& gs, const UserSet& a,
                                             const UserSet& b, const UserSet& c,
                                             int l);

// Full chain builders; force skips the regime check (the chain may then
// legitimately fail its premises).
ProofChain build_theorem1_chain(const NetworkConfig& cfg, bool force = false);
ProofChain build_theorem2_chain(const NetworkConfig& cfg, bool force = false);

// Converts a chain into LP multipliers; every general submodularity or
// monotonicity use is expanded into elemental rows. SYMM steps require the
// LP's symmetry constraints and a permutation inside its orbit structure.
DualCertificate chain_to_certificate(const ProofChain& chain, const LpProblem& lp);

// Line-oriented transcript and JSON forms; both round-trip.
std::string chain_to_transcript(const ProofChain& chain);
ProofChain chain_from_transcript(const std::string& text);
std::string chain_to_json(const ProofChain& chain);
ProofChain chain_from_json(const std::string& text);

// The user permutation realizing a cyclic left shift by s.
std::vector<int> shift_permutation(int k, int s);

// A permutation fixing `fixed` pointwise with pi(d_from) = d_to; requires
// the fixed users to request identical files in both demands.
std::vector<int> matching_permutation(const Demand& d_from, const Demand& d_to,
                                      const UserSet& fixed);

} // namespace cachekit
