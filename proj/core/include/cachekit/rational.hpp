#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include <boost/multiprecision/gmp.hpp>

namespace cachekit {

// Exact arithmetic for every memory, rate, entropy and LP coefficient in the
// toolkit. GMP keeps values canonical: lowest terms, positive denominator.
using Rational = boost::multiprecision::mpq_rational;
using Integer = boost::multiprecision::mpz_int;

class DomainError : public std::runtime_error {
public:
    explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

inline Rational rat(long long num, long long den = 1)
{
    if (den == 0)
        throw DomainError("rational with zero denominator");
    return Rational(Integer(num), Integer(den));
}

// Parses "p/q" or "p" with an optional leading '-' on the numerator.
// Anything else (floats in particular) is rejected.
Rational parse_rational(std::string_view text);

// "p/q", or just "p" when the denominator is 1.
std::string to_string(const Rational& value);

// C(n, k) as an exact integer; zero outside 0 <= k <= n.
Integer binomial(int n, int k);

long long lcm_ll(long long a, long long b);

} // namespace cachekit
