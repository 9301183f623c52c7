#include "cachekit/rational.hpp"

#include <cctype>
#include <numeric>

namespace cachekit {

namespace {

bool all_digits(std::string_view s)
{
    if (s.empty())
        return false;
    for (char c : s)
        if (!std::isdigit(static_cast<unsigned char>(c)))
            return false;
    return true;
}

} // namespace

Rational parse_rational(std::string_view text)
{
    std::string_view num = text;
    std::string_view den = "1";
    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        num = text.substr(0, slash);
        den = text.substr(slash + 1);
    }
    bool negative = false;
    if (!num.empty() && (num.front() == '-' || num.front() == '+')) {
        negative = num.front() == '-';
        num.remove_prefix(1);
    }
    if (!all_digits(num) || !all_digits(den))
        throw DomainError("not a rational 'p/q': '" + std::string(text) + "'");
    Integer p{std::string(num)};
    Integer q{std::string(den)};
    if (q == 0)
        throw DomainError("rational with zero denominator: '" + std::string(text) + "'");
    // Division canonicalizes; never rely on raw mpq assignment.
    Rational r = Rational(p) / Rational(q);
    return negative ? Rational(-r) : r;
}

std::string to_string(const Rational& value)
{
    Integer num = numerator(value);
    Integer den = denominator(value);
    if (den == 1)
        return num.str();
    return num.str() + "/" + den.str();
}

Integer binomial(int n, int k)
{
    if (k < 0 || k > n || n < 0)
        return 0;
    if (k > n - k)
        k = n - k;
    Integer result = 1;
    for (int i = 1; i <= k; ++i) {
        result *= n - k + i;
        result /= i;
    }
    return result;
}

long long lcm_ll(long long a, long long b)
{
    return std::lcm(a, b);
}

} // namespace cachekit
