#pragma once

#include <boost/multiprecision/gmp.hpp>

#include <charconv>
#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <system_error>
#include <type_traits>

#include "fitchain/error.hpp"

namespace fitchain {

using Rational = boost::multiprecision::mpq_rational;
using BigInt = boost::multiprecision::mpz_int;

template <class Real>
double as_double(const Real& x)
{
    if constexpr (std::is_floating_point_v<Real>)
        return static_cast<double>(x);
    else
        return x.template convert_to<double>();
}

inline Rational pow2(int exponent)
{
    BigInt one = 1;
    if (exponent >= 0)
        return Rational(BigInt(one << exponent));
    return Rational(one, BigInt(one << -exponent));
}

/// Exact value of a finite double (every double is a dyadic rational).
inline Rational rational_from_double_exact(double x)
{
    if (!std::isfinite(x))
        throw Error(ErrorCode::InvalidArgument, "non-finite value has no rational form");
    if (x == 0.0)
        return Rational(0);
    int exponent = 0;
    const double mantissa = std::frexp(x, &exponent);
    const auto scaled = static_cast<std::int64_t>(std::ldexp(mantissa, 53));
    return Rational(scaled) * pow2(exponent - 53);
}

/// Parses "p/q", an integer, or a decimal with optional exponent ("0.25", "1e-3").
inline Rational parse_rational(std::string_view text)
{
    auto fail = [&] { return Error(ErrorCode::ParseError, "not a rational number: '" + std::string(text) + "'"); };
    while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
    while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
    if (text.empty())
        throw fail();

    if (const auto slash = text.find('/'); slash != std::string_view::npos) {
        const std::string num(text.substr(0, slash));
        const std::string den(text.substr(slash + 1));
        auto is_int = [](const std::string& s) {
            std::size_t i = (!s.empty() && (s[0] == '-' || s[0] == '+')) ? 1 : 0;
            if (i >= s.size()) return false;
            for (; i < s.size(); ++i)
                if (s[i] < '0' || s[i] > '9') return false;
            return true;
        };
        if (!is_int(num) || !is_int(den))
            throw fail();
        auto to_big = [](std::string s) {
            bool negative = false;
            if (s[0] == '+' || s[0] == '-') {
                negative = s[0] == '-';
                s.erase(0, 1);
            }
            const auto nonzero = s.find_first_not_of('0');  // GMP reads a leading 0 as octal
            BigInt v(nonzero == std::string::npos ? std::string("0") : s.substr(nonzero));
            return negative ? BigInt(-v) : v;
        };
        BigInt n = to_big(num);
        BigInt d = to_big(den);
        if (d == 0)
            throw Error(ErrorCode::ParseError, "zero denominator in '" + std::string(text) + "'");
        return Rational(n, d);
    }

    // decimal form
    std::size_t i = 0;
    bool negative = false;
    if (text[i] == '-' || text[i] == '+') {
        negative = text[i] == '-';
        ++i;
    }
    std::string digits;
    int fraction_digits = 0;
    bool seen_point = false;
    bool any_digit = false;
    for (; i < text.size(); ++i) {
        const char c = text[i];
        if (c >= '0' && c <= '9') {
            digits.push_back(c);
            any_digit = true;
            if (seen_point) ++fraction_digits;
        } else if (c == '.' && !seen_point) {
            seen_point = true;
        } else {
            break;
        }
    }
    if (!any_digit)
        throw fail();
    long exponent = 0;
    if (i < text.size()) {
        if (text[i] != 'e' && text[i] != 'E')
            throw fail();
        ++i;
        const auto rest = text.substr(i);
        const char* first = rest.data();
        const char* last = rest.data() + rest.size();
        if (first != last && *first == '+') ++first;
        auto [ptr, ec] = std::from_chars(first, last, exponent);
        if (ec != std::errc() || ptr != last)
            throw fail();
    }
    // GMP reads a leading 0 as an octal prefix
    const auto nonzero = digits.find_first_not_of('0');
    BigInt mantissa(nonzero == std::string::npos ? std::string("0") : digits.substr(nonzero));
    if (negative) mantissa = -mantissa;
    const long scale = exponent - fraction_digits;
    BigInt ten_power = 1;
    for (long k = 0; k < (scale < 0 ? -scale : scale); ++k) ten_power *= 10;
    if (scale >= 0)
        return Rational(BigInt(mantissa * ten_power));
    return Rational(mantissa, ten_power);
}

/// Shortest round-trip decimal of a double, read back as an exact rational ("0.1" -> 1/10).
inline Rational rational_from_double_decimal(double x)
{
    char buffer[64];
    auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof buffer, x);
    if (ec != std::errc())
        throw Error(ErrorCode::InvalidArgument, "cannot format double");
    return parse_rational(std::string_view(buffer, static_cast<std::size_t>(ptr - buffer)));
}

inline std::string to_string(const Rational& q)
{
    const auto num = boost::multiprecision::numerator(q);
    const auto den = boost::multiprecision::denominator(q);
    if (den == 1)
        return num.str();
    return num.str() + "/" + den.str();
}

} // namespace fitchain
